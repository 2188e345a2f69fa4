//! A small exact computer-algebra kernel for finitely presented
//! graded-commutative rings with a top-degree integration functional.
//!
//! A [`RingPresentation`] is a polynomial ring on generators of positive
//! even cohomological degree modulo homogeneous relations, together with a
//! top degree and a designated top-degree monomial of integral 1.  Per-degree
//! normal forms are computed once at build time by exact Gaussian
//! elimination on the span of `monomial x relation` in each degree; no
//! Groebner machinery.  The build also verifies that the quotient vanishes
//! above the top degree and that the Poincare pairing is nondegenerate in
//! every complementary degree pair, so a presentation that passes
//! construction really is the ring of a compact space of the stated
//! dimension.
//!
//! [`ClassElement`]s are immutable normal-form linear combinations of basis
//! monomials; all operations are pure, so rings and classes can be shared
//! freely across threads.  Pushforwards along a [`RingMapDescriptor`] are
//! defined by Poincare duality (the projection formula), which only needs
//! the presentations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    RelationNotHomogeneous { ring: String, relation: String },
    DegeneratePairing { ring: String, degree: u32, detail: String },
    UnknownGenerator { ring: String, name: String },
    DegreeOverflow { detail: String },
    NonRepresentable { detail: String },
    InvalidPresentation { detail: String },
    InvalidDescriptor { detail: String },
    Parse { detail: String },
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::RelationNotHomogeneous { ring, relation } => {
                write!(f, "relation {relation} of {ring} is not homogeneous")
            }
            RingError::DegeneratePairing { ring, degree, detail } => {
                write!(f, "degenerate pairing in {ring} at degree {degree}: {detail}")
            }
            RingError::UnknownGenerator { ring, name } => {
                write!(f, "unknown generator {name:?} in {ring}")
            }
            RingError::DegreeOverflow { detail } => write!(f, "degree overflow: {detail}"),
            RingError::NonRepresentable { detail } => {
                write!(f, "pushforward not representable: {detail}")
            }
            RingError::InvalidPresentation { detail } => {
                write!(f, "invalid presentation: {detail}")
            }
            RingError::InvalidDescriptor { detail } => write!(f, "invalid descriptor: {detail}"),
            RingError::Parse { detail } => write!(f, "parse error: {detail}"),
        }
    }
}

impl std::error::Error for RingError {}

/// Exponent vector over the ring's generator list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn unit(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Plain polynomial over exponent vectors; the input form for relations and
/// for classes before normalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: Rat) -> &mut Self {
        if coeff.is_zero() {
            return self;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
        self
    }

    pub fn term(mono: Monomial, coeff: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(mono, coeff);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }
}

/// Per-degree normal-form data.
struct DegreeData {
    /// Quotient basis monomials of this degree, descending graded-lex.
    basis: Vec<Monomial>,
    /// Normal form of every monomial of this degree, as coordinates over
    /// `basis` (index, coefficient).
    reduce: HashMap<Monomial, Vec<(usize, Rat)>>,
    /// Pairing matrix against the basis of the complementary degree:
    /// `pairing[i][j] = integral(basis[i] * complement_basis[j])`.
    pairing: Vec<Vec<Rat>>,
}

pub struct RingPresentation {
    name: String,
    gens: Vec<(String, u32)>,
    relations: Vec<Poly>,
    top_degree: u32,
    normalizer: Monomial,
    normalizer_coeff: Rat,
    normalizer_basis_index: usize,
    degrees: Vec<Option<DegreeData>>,
}

impl fmt::Debug for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingPresentation")
            .field("name", &self.name)
            .field("gens", &self.gens)
            .field("top_degree", &self.top_degree)
            .finish()
    }
}

impl RingPresentation {
    /// Build and fully validate a presentation.
    ///
    /// Computes the per-degree monomial bases by exact elimination, checks
    /// the quotient vanishes above the top degree, that the top component is
    /// one-dimensional, and that the Poincare pairing is nondegenerate in
    /// every complementary pair.
    pub fn build(
        name: &str,
        gens: &[(&str, u32)],
        relations: Vec<Poly>,
        top_degree: u32,
        normalizer: Monomial,
    ) -> Result<Arc<Self>, RingError> {
        if gens.is_empty() {
            return Err(RingError::InvalidPresentation {
                detail: format!("{name}: no generators"),
            });
        }
        if top_degree == 0 || !top_degree.is_multiple_of(2) {
            return Err(RingError::InvalidPresentation {
                detail: format!("{name}: top degree must be positive and even"),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for (g, d) in gens {
            if g.is_empty() || !seen.insert(g.to_string()) {
                return Err(RingError::InvalidPresentation {
                    detail: format!("{name}: bad or duplicate generator name {g:?}"),
                });
            }
            if *d == 0 || *d % 2 != 0 {
                return Err(RingError::InvalidPresentation {
                    detail: format!("{name}: generator {g} must have positive even degree"),
                });
            }
            if *d > top_degree {
                return Err(RingError::InvalidPresentation {
                    detail: format!("{name}: generator {g} exceeds the top degree"),
                });
            }
        }
        let gens: Vec<(String, u32)> = gens.iter().map(|(g, d)| (g.to_string(), *d)).collect();

        let mono_degree = |m: &Monomial| -> u32 {
            m.exps()
                .iter()
                .zip(&gens)
                .map(|(e, (_, d))| e * d)
                .sum()
        };

        // Relations must be homogeneous and nonzero.
        let mut rel_degrees = Vec::new();
        for r in &relations {
            let mut degs = r.terms().map(|(m, _)| mono_degree(m));
            let first = degs.next().ok_or_else(|| RingError::InvalidPresentation {
                detail: format!("{name}: zero relation"),
            })?;
            if degs.any(|d| d != first) {
                return Err(RingError::RelationNotHomogeneous {
                    ring: name.to_string(),
                    relation: format!("{:?}", r),
                });
            }
            rel_degrees.push(first);
        }

        if mono_degree(&normalizer) != top_degree || normalizer.exps().len() != gens.len() {
            return Err(RingError::InvalidPresentation {
                detail: format!("{name}: normalizer must be a top-degree monomial"),
            });
        }

        let mut ring = RingPresentation {
            name: name.to_string(),
            gens,
            relations,
            top_degree,
            normalizer,
            normalizer_coeff: Rat::one(),
            normalizer_basis_index: 0,
            degrees: vec![],
        };
        ring.degrees = (0..=top_degree as usize)
            .map(|d| {
                if d % 2 == 0 {
                    Some(ring.degree_data(d as u32, &rel_degrees))
                } else {
                    None
                }
            })
            .collect();

        // The quotient must vanish strictly above the top degree; checking
        // the window (top, 2*top] suffices because generator degrees are at
        // most top, so any higher monomial has a sub-monomial in the window.
        for d in ((top_degree + 2)..=(2 * top_degree)).step_by(2) {
            let data = ring.degree_data(d, &rel_degrees);
            if !data.basis.is_empty() {
                return Err(RingError::DegeneratePairing {
                    ring: ring.name.clone(),
                    degree: d,
                    detail: "quotient does not vanish above the top degree".into(),
                });
            }
        }

        let top = ring.data(top_degree);
        if top.basis.len() != 1 {
            return Err(RingError::DegeneratePairing {
                ring: ring.name.clone(),
                degree: top_degree,
                detail: format!("top component has dimension {}", top.basis.len()),
            });
        }
        let nf = top.reduce[&ring.normalizer].clone();
        match nf.as_slice() {
            [(idx, c)] if !c.is_zero() => {
                ring.normalizer_basis_index = *idx;
                ring.normalizer_coeff = c.clone();
            }
            _ => {
                return Err(RingError::InvalidPresentation {
                    detail: format!("{}: normalizer reduces to zero", ring.name),
                })
            }
        }

        ring.fill_pairings()?;
        Ok(Arc::new(ring))
    }

    fn degree_data(&self, degree: u32, rel_degrees: &[u32]) -> DegreeData {
        let mut monos = self.monomials_of_degree(degree);
        monos.sort_by(|a, b| b.cmp(a)); // descending graded-lex
        let index: HashMap<&Monomial, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();

        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (rel, &rd) in self.relations.iter().zip(rel_degrees) {
            if rd > degree {
                continue;
            }
            for mult in self.monomials_of_degree(degree - rd) {
                let mut row = vec![Rat::zero(); monos.len()];
                for (m, c) in rel.terms() {
                    row[index[&mult.mul(m)]] += c;
                }
                rows.push(row);
            }
        }
        let pivots = linalg::rref(&mut rows);

        let pivot_of: HashMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let basis: Vec<Monomial> = monos
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivot_of.contains_key(i))
            .map(|(_, m)| m.clone())
            .collect();
        let basis_pos: HashMap<usize, usize> = monos
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivot_of.contains_key(i))
            .enumerate()
            .map(|(b, (i, _))| (i, b))
            .collect();

        let mut reduce = HashMap::new();
        for (i, m) in monos.iter().enumerate() {
            let nf = match pivot_of.get(&i) {
                None => vec![(basis_pos[&i], Rat::one())],
                Some(&r) => rows[r]
                    .iter()
                    .enumerate()
                    .filter(|(j, v)| *j != i && !v.is_zero())
                    .map(|(j, v)| (basis_pos[&j], -v.clone()))
                    .collect(),
            };
            reduce.insert(m.clone(), nf);
        }

        DegreeData { basis, reduce, pairing: vec![] }
    }

    fn fill_pairings(&mut self) -> Result<(), RingError> {
        for d in (0..=self.top_degree).step_by(2) {
            let comp = self.top_degree - d;
            let rows = self.data(d).basis.len();
            let cols = self.data(comp).basis.len();
            if rows != cols {
                return Err(RingError::DegeneratePairing {
                    ring: self.name.clone(),
                    degree: d,
                    detail: format!("basis dims {rows} vs {cols} in complementary degrees"),
                });
            }
            let mut matrix = Vec::with_capacity(rows);
            for i in 0..rows {
                let mut row = Vec::with_capacity(cols);
                for j in 0..cols {
                    let prod = self.data(d).basis[i].mul(&self.data(comp).basis[j]);
                    row.push(self.integral_of_monomial(&prod));
                }
                matrix.push(row);
            }
            if !linalg::is_invertible(matrix.clone()) {
                return Err(RingError::DegeneratePairing {
                    ring: self.name.clone(),
                    degree: d,
                    detail: "pairing matrix is singular".into(),
                });
            }
            self.degrees[d as usize].as_mut().unwrap().pairing = matrix;
        }
        Ok(())
    }

    /// Integral of a raw top-degree monomial (pre-normalization), used while
    /// building the pairing matrices.
    fn integral_of_monomial(&self, m: &Monomial) -> Rat {
        if self.monomial_degree(m) != self.top_degree {
            return Rat::zero();
        }
        let nf = &self.data(self.top_degree).reduce[m];
        nf.iter()
            .find(|(i, _)| *i == self.normalizer_basis_index)
            .map(|(_, c)| c / &self.normalizer_coeff)
            .unwrap_or_else(Rat::zero)
    }

    fn data(&self, degree: u32) -> &DegreeData {
        self.degrees[degree as usize].as_ref().unwrap()
    }

    fn monomials_of_degree(&self, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.gens.len()];
        self.enumerate_monos(0, degree, &mut exps, &mut out);
        out
    }

    fn enumerate_monos(&self, gi: usize, remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if gi == self.gens.len() {
            if remaining == 0 {
                out.push(Monomial::new(exps.clone()));
            }
            return;
        }
        let d = self.gens[gi].1;
        let max = remaining / d;
        for e in 0..=max {
            exps[gi] = e;
            self.enumerate_monos(gi + 1, remaining - e * d, exps, out);
        }
        exps[gi] = 0;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[(String, u32)] {
        &self.gens
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|(g, _)| g == name)
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.exps().iter().zip(&self.gens).map(|(e, (_, d))| e * d).sum()
    }

    /// Quotient basis monomials in one degree (empty above top or in odd degrees).
    pub fn basis(&self, degree: u32) -> &[Monomial] {
        if !degree.is_multiple_of(2) || degree > self.top_degree {
            return &[];
        }
        &self.data(degree).basis
    }

    /// Dimensions of the graded pieces in degrees `0, 2, ..., top`.
    pub fn basis_dims(&self) -> Vec<usize> {
        (0..=self.top_degree)
            .step_by(2)
            .map(|d| self.data(d).basis.len())
            .collect()
    }

    /// Re-verify that the Poincare pairing matrix is square and invertible
    /// in every complementary degree pair (the build already guarantees it;
    /// this re-runs the exact rank checks on demand).
    pub fn verify_pairing(&self) -> Result<(), RingError> {
        for d in (0..=self.top_degree).step_by(2) {
            let data = self.data(d);
            let comp = self.data(self.top_degree - d);
            if data.basis.len() != comp.basis.len()
                || !linalg::is_invertible(data.pairing.clone())
            {
                return Err(RingError::DegeneratePairing {
                    ring: self.name.clone(),
                    degree: d,
                    detail: "pairing re-verification failed".into(),
                });
            }
        }
        Ok(())
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exps()
            .iter()
            .zip(&self.gens)
            .filter(|(e, _)| **e > 0)
            .map(|(e, (g, _))| if *e == 1 { g.clone() } else { format!("{g}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

fn same_ring(a: &Arc<RingPresentation>, b: &Arc<RingPresentation>) -> bool {
    Arc::ptr_eq(a, b)
        || (a.name == b.name && a.gens == b.gens && a.relations == b.relations
            && a.top_degree == b.top_degree)
}

/// A cohomology class in normal form: a coefficient map over the quotient
/// basis monomials of its ring.  The zero class has an empty map.
#[derive(Clone)]
pub struct ClassElement {
    ring: Arc<RingPresentation>,
    coeffs: BTreeMap<Monomial, Rat>,
}

impl ClassElement {
    pub fn zero(ring: &Arc<RingPresentation>) -> Self {
        ClassElement { ring: Arc::clone(ring), coeffs: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<RingPresentation>) -> Self {
        Self::from_poly(ring, &Poly::term(Monomial::unit(ring.gens.len()), Rat::one()))
    }

    pub fn generator(ring: &Arc<RingPresentation>, name: &str) -> Result<Self, RingError> {
        let idx = ring
            .generator_index(name)
            .ok_or_else(|| RingError::UnknownGenerator {
                ring: ring.name.clone(),
                name: name.to_string(),
            })?;
        let mut exps = vec![0; ring.gens.len()];
        exps[idx] = 1;
        Ok(Self::from_poly(ring, &Poly::term(Monomial::new(exps), Rat::one())))
    }

    /// Normal form of an arbitrary polynomial: each monomial reduced modulo
    /// the relations, components above the top degree dropped (the build
    /// verified the quotient vanishes there).  Idempotent and linear.
    pub fn from_poly(ring: &Arc<RingPresentation>, p: &Poly) -> Self {
        let mut coeffs: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in p.terms() {
            let deg = ring.monomial_degree(m);
            if !deg.is_multiple_of(2) || deg > ring.top_degree {
                continue;
            }
            let data = ring.data(deg);
            for (bi, bc) in &data.reduce[m] {
                let entry = coeffs
                    .entry(data.basis[*bi].clone())
                    .or_insert_with(Rat::zero);
                *entry += c * bc;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        ClassElement { ring: Arc::clone(ring), coeffs }
    }

    /// Single basis monomial `gen^e` products, e.g. `monomial(&[2,1])`.
    pub fn monomial(ring: &Arc<RingPresentation>, exps: &[u32]) -> Self {
        Self::from_poly(ring, &Poly::term(Monomial::new(exps.to_vec()), Rat::one()))
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.coeffs.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.coeffs.iter()
    }

    /// Cohomological degree when homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.coeffs.keys().map(|m| self.ring.monomial_degree(m));
        let first = degs.next()?;
        if degs.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn homogeneous_component(&self, degree: u32) -> ClassElement {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(m, _)| self.ring.monomial_degree(m) == degree)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        ClassElement { ring: Arc::clone(&self.ring), coeffs }
    }

    pub fn homogeneous_components(&self) -> Vec<(u32, ClassElement)> {
        let mut degs: Vec<u32> = self
            .coeffs
            .keys()
            .map(|m| self.ring.monomial_degree(m))
            .collect();
        degs.sort_unstable();
        degs.dedup();
        degs.into_iter()
            .map(|d| (d, self.homogeneous_component(d)))
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> ClassElement {
        if c.is_zero() {
            return ClassElement::zero(&self.ring);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, v)| (m.clone(), v * c))
            .collect();
        ClassElement { ring: Arc::clone(&self.ring), coeffs }
    }

    pub fn pow(&self, e: u32) -> ClassElement {
        let mut acc = ClassElement::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient of the designated top-degree normalizer; components below
    /// the top degree contribute zero.
    pub fn integrate(&self) -> Rat {
        let ring = &self.ring;
        let top = ring.data(ring.top_degree);
        let target = &top.basis[ring.normalizer_basis_index];
        self.coeff(target) / &ring.normalizer_coeff
    }
}

impl PartialEq for ClassElement {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.coeffs == other.coeffs
    }
}

impl Eq for ClassElement {}

fn format_terms<'a>(
    gens: &[(String, u32)],
    terms: impl Iterator<Item = (&'a Monomial, &'a Rat)>,
) -> String {
    let mono_string = |m: &Monomial| -> String {
        let parts: Vec<String> = m
            .exps()
            .iter()
            .zip(gens)
            .filter(|(e, _)| **e > 0)
            .map(|(e, (g, _))| if *e == 1 { g.clone() } else { format!("{g}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    };
    let mut out = String::new();
    for (m, c) in terms {
        let ms = mono_string(m);
        let (sign, mag) = if c < &Rat::zero() {
            ("-", -c.clone())
        } else {
            ("+", c.clone())
        };
        if out.is_empty() {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if mag.is_one() && ms != "1" {
            out.push_str(&ms);
        } else if ms == "1" {
            out.push_str(&mag.to_string());
        } else {
            out.push_str(&format!("{mag}*{ms}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for ClassElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_terms(&self.ring.gens, self.coeffs.iter().rev()))
    }
}

impl fmt::Debug for ClassElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} in {}]", self, self.ring.name)
    }
}

impl std::ops::Add for &ClassElement {
    type Output = ClassElement;
    fn add(self, rhs: &ClassElement) -> ClassElement {
        assert!(same_ring(&self.ring, &rhs.ring), "mixed rings in +");
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &rhs.coeffs {
            let entry = coeffs.entry(m.clone()).or_insert_with(Rat::zero);
            *entry += c;
        }
        coeffs.retain(|_, v| !v.is_zero());
        ClassElement { ring: Arc::clone(&self.ring), coeffs }
    }
}

impl std::ops::Sub for &ClassElement {
    type Output = ClassElement;
    fn sub(self, rhs: &ClassElement) -> ClassElement {
        assert!(same_ring(&self.ring, &rhs.ring), "mixed rings in -");
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &rhs.coeffs {
            let entry = coeffs.entry(m.clone()).or_insert_with(Rat::zero);
            *entry -= c;
        }
        coeffs.retain(|_, v| !v.is_zero());
        ClassElement { ring: Arc::clone(&self.ring), coeffs }
    }
}

impl ClassElement {
    pub fn neg(&self) -> ClassElement {
        self.scale(&-Rat::one())
    }
}

impl std::ops::Mul for &ClassElement {
    type Output = ClassElement;
    fn mul(self, rhs: &ClassElement) -> ClassElement {
        assert!(same_ring(&self.ring, &rhs.ring), "mixed rings in *");
        let mut raw = Poly::zero();
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &rhs.coeffs {
                raw.add_term(m1.mul(m2), c1 * c2);
            }
        }
        ClassElement::from_poly(&self.ring, &raw)
    }
}

/// A ring map between presented rings: the pullback is determined by
/// generator images (checked to respect relations at construction), and the
/// pushforward is the Poincare-dual adjoint, dropping degree by
/// `2 * fiber_codim_shift`.
#[derive(Clone)]
pub struct RingMapDescriptor {
    source: Arc<RingPresentation>,
    target: Arc<RingPresentation>,
    generator_images: Vec<ClassElement>,
    fiber_codim_shift: i64,
}

impl RingMapDescriptor {
    pub fn new(
        source: &Arc<RingPresentation>,
        target: &Arc<RingPresentation>,
        generator_images: Vec<ClassElement>,
        fiber_codim_shift: i64,
    ) -> Result<Self, RingError> {
        if generator_images.len() != source.gens.len() {
            return Err(RingError::InvalidDescriptor {
                detail: format!(
                    "{} -> {}: expected {} generator images",
                    source.name,
                    target.name,
                    source.gens.len()
                ),
            });
        }
        for (img, (g, d)) in generator_images.iter().zip(&source.gens) {
            if !same_ring(img.ring(), target) {
                return Err(RingError::InvalidDescriptor {
                    detail: format!("image of {g} lives in the wrong ring"),
                });
            }
            if !img.is_zero() && img.degree() != Some(*d) {
                return Err(RingError::DegreeOverflow {
                    detail: format!("image of {g} is not homogeneous of degree {d}"),
                });
            }
        }
        if target.top_degree as i64 != source.top_degree as i64 + 2 * fiber_codim_shift {
            return Err(RingError::InvalidDescriptor {
                detail: format!(
                    "{} -> {}: top degrees inconsistent with fiber shift {}",
                    source.name, target.name, fiber_codim_shift
                ),
            });
        }
        let map = RingMapDescriptor {
            source: Arc::clone(source),
            target: Arc::clone(target),
            generator_images,
            fiber_codim_shift,
        };
        // The pullback must kill every relation of the source.
        for rel in &map.source.relations {
            let image = map.pullback_poly(rel);
            if !image.is_zero() {
                return Err(RingError::InvalidDescriptor {
                    detail: format!(
                        "{} -> {}: relation {:?} is not respected",
                        map.source.name, map.target.name, rel
                    ),
                });
            }
        }
        Ok(map)
    }

    pub fn source(&self) -> &Arc<RingPresentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RingPresentation> {
        &self.target
    }

    pub fn fiber_codim_shift(&self) -> i64 {
        self.fiber_codim_shift
    }

    fn pullback_poly(&self, p: &Poly) -> ClassElement {
        let mut acc = ClassElement::zero(&self.target);
        let mut powers: HashMap<(usize, u32), ClassElement> = HashMap::new();
        for (m, c) in p.terms() {
            let mut term = ClassElement::one(&self.target);
            for (gi, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((gi, e))
                    .or_insert_with(|| self.generator_images[gi].pow(e))
                    .clone();
                term = &term * &p;
            }
            acc = &acc + &term.scale(c);
        }
        acc
    }

    /// Ring homomorphism on classes of the source.
    pub fn pullback(&self, x: &ClassElement) -> ClassElement {
        assert!(same_ring(x.ring(), &self.source), "pullback of a foreign class");
        let mut p = Poly::zero();
        for (m, c) in x.coeffs() {
            p.add_term(m.clone(), c.clone());
        }
        self.pullback_poly(&p)
    }

    /// The unique class `y` with `int_source(y * z) = int_target(x * pullback(z))`
    /// for all `z` (projection-formula definition).
    pub fn pushforward(&self, x: &ClassElement) -> Result<ClassElement, RingError> {
        assert!(same_ring(x.ring(), &self.target), "pushforward of a foreign class");
        let mut out = ClassElement::zero(&self.source);
        for (deg, comp) in x.homogeneous_components() {
            let target_deg = deg as i64 - 2 * self.fiber_codim_shift;
            if target_deg < 0 || target_deg > self.source.top_degree as i64 {
                continue;
            }
            let ydeg = target_deg as u32;
            let zdeg = self.source.top_degree - ydeg;
            let ybasis = self.source.basis(ydeg).to_vec();
            let zbasis = self.source.basis(zdeg).to_vec();
            // Pairing matrix of the source in degree ydeg (basis x complement).
            let pairing = &self.source.data(ydeg).pairing;
            let rhs: Vec<Rat> = zbasis
                .iter()
                .map(|z| {
                    let zc = ClassElement::monomial(&self.source, z.exps());
                    (&comp * &self.pullback(&zc)).integrate()
                })
                .collect();
            // Solve sum_i y_i pairing[i][j] = rhs[j].
            let mut system: Vec<Vec<Rat>> = (0..zbasis.len())
                .map(|j| (0..ybasis.len()).map(|i| pairing[i][j].clone()).collect())
                .collect();
            let sol = linalg::solve_square(&mut system, rhs).ok_or(RingError::NonRepresentable {
                detail: format!(
                    "pairing system singular pushing {} -> {} in degree {}",
                    self.target.name, self.source.name, deg
                ),
            })?;
            let mut p = Poly::zero();
            for (y, c) in ybasis.iter().zip(sol) {
                p.add_term(y.clone(), c);
            }
            out = &out + &ClassElement::from_poly(&self.source, &p);
        }
        Ok(out)
    }
}

mod linalg {
    use super::Rat;
    use num_traits::Zero;

    /// In-place reduced row echelon form; returns the pivot columns in order.
    pub fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = rows[r][c].clone().recip();
            for v in rows[r].iter_mut() {
                *v *= &inv;
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    let pivot_row = rows[r].clone();
                    for (target, source) in rows[i].iter_mut().zip(&pivot_row) {
                        *target -= source * &f;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        pivots
    }

    pub fn is_invertible(m: Vec<Vec<Rat>>) -> bool {
        let n = m.len();
        if n == 0 {
            return true;
        }
        let mut rows = m;
        let pivots = rref(&mut rows);
        pivots.len() == n
    }

    /// Solve the square system `a * x = b`; `None` when singular.
    pub fn solve_square(a: &mut Vec<Vec<Rat>>, b: Vec<Rat>) -> Option<Vec<Rat>> {
        let n = b.len();
        if n == 0 {
            return Some(vec![]);
        }
        for (row, rhs) in a.iter_mut().zip(b) {
            row.push(rhs);
        }
        let pivots = rref(a);
        if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut x = vec![Rat::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = a[r][n].clone();
        }
        Some(x)
    }
}

// ---------------------------------------------------------------------------
// Declarative text format
// ---------------------------------------------------------------------------

/// Parse a presentation from the declarative text format:
///
/// ```text
/// ring A*(E)
/// gen h 2
/// gen h' 2
/// rel h^3
/// rel h'^3
/// rel h^2 - h*h' + h'^2
/// top 6
/// normalizer h*h'^2
/// ```
pub fn parse_presentation(text: &str) -> Result<Arc<RingPresentation>, RingError> {
    let mut name = None;
    let mut gens: Vec<(String, u32)> = Vec::new();
    let mut rel_src: Vec<String> = Vec::new();
    let mut top = None;
    let mut normalizer_src = None;

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).ok_or(RingError::Parse {
            detail: format!("bad line {line:?}"),
        })?;
        let rest = rest.trim();
        match kw {
            "ring" => name = Some(rest.to_string()),
            "gen" => {
                let (g, d) = rest.rsplit_once(char::is_whitespace).ok_or(RingError::Parse {
                    detail: format!("bad gen line {line:?}"),
                })?;
                let d: u32 = d.trim().parse().map_err(|_| RingError::Parse {
                    detail: format!("bad degree in {line:?}"),
                })?;
                gens.push((g.trim().to_string(), d));
            }
            "rel" => rel_src.push(rest.to_string()),
            "top" => {
                top = Some(rest.parse::<u32>().map_err(|_| RingError::Parse {
                    detail: format!("bad top degree {rest:?}"),
                })?)
            }
            "normalizer" => normalizer_src = Some(rest.to_string()),
            _ => {
                return Err(RingError::Parse { detail: format!("unknown directive {kw:?}") });
            }
        }
    }

    let name = name.ok_or(RingError::Parse { detail: "missing ring name".into() })?;
    let top = top.ok_or(RingError::Parse { detail: "missing top degree".into() })?;
    let normalizer_src =
        normalizer_src.ok_or(RingError::Parse { detail: "missing normalizer".into() })?;
    let gen_refs: Vec<(&str, u32)> = gens.iter().map(|(g, d)| (g.as_str(), *d)).collect();

    let relations = rel_src
        .iter()
        .map(|s| parse_poly(&name, &gens, s))
        .collect::<Result<Vec<_>, _>>()?;
    let norm_poly = parse_poly(&name, &gens, &normalizer_src)?;
    let normalizer = match norm_poly.terms().collect::<Vec<_>>().as_slice() {
        [(m, c)] if c.is_one() => (*m).clone(),
        _ => {
            return Err(RingError::Parse {
                detail: format!("normalizer {normalizer_src:?} must be a single monomial"),
            })
        }
    };

    RingPresentation::build(&name, &gen_refs, relations, top, normalizer)
}

impl RingPresentation {
    /// Serialize back to the declarative text format.
    pub fn presentation_text(&self) -> String {
        let mut out = format!("ring {}\n", self.name);
        for (g, d) in &self.gens {
            out.push_str(&format!("gen {g} {d}\n"));
        }
        for r in &self.relations {
            out.push_str(&format!("rel {}\n", format_terms(&self.gens, r.terms.iter().rev())));
        }
        out.push_str(&format!("top {}\n", self.top_degree));
        out.push_str(&format!("normalizer {}\n", self.monomial_string(&self.normalizer)));
        out
    }

    /// Parse a polynomial in this ring's generators and return its normal form.
    pub fn class_from_text(self: &Arc<Self>, text: &str) -> Result<ClassElement, RingError> {
        let p = parse_poly(&self.name, &self.gens, text)?;
        Ok(ClassElement::from_poly(self, &p))
    }
}

fn parse_poly(ring: &str, gens: &[(String, u32)], src: &str) -> Result<Poly, RingError> {
    #[derive(Debug, PartialEq)]
    enum Tok {
        Num(Rat),
        Ident(String),
        Plus,
        Minus,
        Star,
        Caret,
    }
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let r = crate::rational::parse_rat(&s)
                .map_err(|e| RingError::Parse { detail: e })?;
            toks.push(Tok::Num(r));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
        } else {
            match c {
                '+' => toks.push(Tok::Plus),
                '-' => toks.push(Tok::Minus),
                '*' => toks.push(Tok::Star),
                '^' => toks.push(Tok::Caret),
                _ => {
                    return Err(RingError::Parse {
                        detail: format!("unexpected character {c:?} in {src:?}"),
                    })
                }
            }
            i += 1;
        }
    }

    let mut poly = Poly::zero();
    let mut pos = 0;
    loop {
        // sign
        let mut sign = Rat::one();
        while pos < toks.len() {
            match toks[pos] {
                Tok::Plus => pos += 1,
                Tok::Minus => {
                    sign = -sign;
                    pos += 1;
                }
                _ => break,
            }
        }
        if pos >= toks.len() {
            if poly.is_zero() && sign.is_one() {
                break;
            }
            return Err(RingError::Parse { detail: format!("dangling sign in {src:?}") });
        }
        // term: factors separated by '*'
        let mut coeff = sign;
        let mut exps = vec![0u32; gens.len()];
        loop {
            match &toks[pos] {
                Tok::Num(r) => {
                    coeff *= r;
                    pos += 1;
                }
                Tok::Ident(name) => {
                    let gi = gens.iter().position(|(g, _)| g == name).ok_or_else(|| {
                        RingError::UnknownGenerator { ring: ring.to_string(), name: name.clone() }
                    })?;
                    pos += 1;
                    let mut e = 1u32;
                    if pos < toks.len() && toks[pos] == Tok::Caret {
                        pos += 1;
                        match toks.get(pos) {
                            Some(Tok::Num(r)) if r.is_integer() && r > &Rat::zero() => {
                                e = r.to_integer().try_into().map_err(|_| RingError::Parse {
                                    detail: format!("exponent too large in {src:?}"),
                                })?;
                                pos += 1;
                            }
                            _ => {
                                return Err(RingError::Parse {
                                    detail: format!("bad exponent in {src:?}"),
                                })
                            }
                        }
                    }
                    exps[gi] += e;
                }
                _ => {
                    return Err(RingError::Parse {
                        detail: format!("unexpected token in {src:?}"),
                    })
                }
            }
            if pos < toks.len() && toks[pos] == Tok::Star {
                pos += 1;
                continue;
            }
            break;
        }
        poly.add_term(Monomial::new(exps), coeff);
        if pos >= toks.len() {
            break;
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat_int, Rat};

    fn p2() -> Arc<RingPresentation> {
        parse_presentation(
            "ring A*(P^2)\ngen H 2\nrel H^3\ntop 4\nnormalizer H^2\n",
        )
        .unwrap()
    }

    fn product_p2() -> Arc<RingPresentation> {
        parse_presentation(
            "ring A*(P^2x(P^2)*)\ngen h 2\ngen h' 2\nrel h^3\nrel h'^3\ntop 8\nnormalizer h^2*h'^2\n",
        )
        .unwrap()
    }

    fn e2() -> Arc<RingPresentation> {
        parse_presentation(
            "ring A*(E)\ngen h 2\ngen h' 2\nrel h^3\nrel h'^3\nrel h^2 - h*h' + h'^2\ntop 6\nnormalizer h*h'^2\n",
        )
        .unwrap()
    }

    #[test]
    fn projective_plane_basis() {
        let r = p2();
        assert_eq!(r.basis_dims(), vec![1, 1, 1]);
        // H^3 reduces to zero
        assert!(r.class_from_text("H^3").unwrap().is_zero());
        assert_eq!(r.class_from_text("H^2").unwrap().integrate(), rat_int(1));
    }

    #[test]
    fn kunneth_product_basis() {
        let r = product_p2();
        assert_eq!(r.basis_dims(), vec![1, 2, 3, 2, 1]);
        assert_eq!(r.basis(4).len(), 3);
        // (h+h')(h^2-h*h'+h'^2) = h^3 + h'^3 = 0
        let x = r.class_from_text("h + h'").unwrap();
        let y = r.class_from_text("h^2 - h*h' + h'^2").unwrap();
        assert!((&x * &y).is_zero());
    }

    #[test]
    fn incidence_ring_betti_and_normal_forms() {
        let r = e2();
        assert_eq!(r.basis_dims(), vec![1, 2, 2, 1]);
        // h^2 reduces to h*h' - h'^2 under the graded-lex order with h > h'
        let h2 = r.class_from_text("h^2").unwrap();
        let expected = r.class_from_text("h*h' - h'^2").unwrap();
        assert_eq!(h2, expected);
        // integrals on E
        assert_eq!(r.class_from_text("h^2*h'").unwrap().integrate(), rat_int(1));
        assert_eq!(r.class_from_text("h^3").unwrap().integrate(), rat_int(0));
        assert_eq!(r.class_from_text("h*h'^2").unwrap().integrate(), rat_int(1));
    }

    #[test]
    fn normal_form_idempotent_and_linear() {
        let r = e2();
        let x = r.class_from_text("3*h^2 - h*h' + 2*h'^2").unwrap();
        // from_poly of an already reduced class is the identity
        let mut p = Poly::zero();
        for (m, c) in x.coeffs() {
            p.add_term(m.clone(), c.clone());
        }
        assert_eq!(ClassElement::from_poly(&r, &p), x);
        let y = r.class_from_text("h*h'").unwrap();
        let lin = &x.scale(&rat_int(5)) + &y.scale(&rat_int(-2));
        let direct = r.class_from_text("15*h^2 - 5*h*h' + 10*h'^2 - 2*h*h'").unwrap();
        assert_eq!(lin, direct);
    }

    #[test]
    fn degenerate_presentation_rejected() {
        // Missing relation: quotient is infinite dimensional above the top.
        let err = RingPresentation::build(
            "bad",
            &[("x", 2)],
            vec![],
            4,
            Monomial::new(vec![2]),
        )
        .unwrap_err();
        assert!(matches!(err, RingError::DegeneratePairing { .. }));
    }

    #[test]
    fn inhomogeneous_relation_rejected() {
        let mut rel = Poly::zero();
        rel.add_term(Monomial::new(vec![1]), Rat::one());
        rel.add_term(Monomial::new(vec![2]), Rat::one());
        let err =
            RingPresentation::build("bad", &[("x", 2)], vec![rel], 4, Monomial::new(vec![2]))
                .unwrap_err();
        assert!(matches!(err, RingError::RelationNotHomogeneous { .. }));
    }

    #[test]
    fn unknown_generator_error() {
        let r = p2();
        let err = r.class_from_text("H + K").unwrap_err();
        assert!(matches!(err, RingError::UnknownGenerator { .. }));
    }

    #[test]
    fn pullback_and_pushforward_along_projection() {
        // p : E -> P^2 with p*(H) = h, fiber P^1.
        let pn = p2();
        let e = e2();
        let h = ClassElement::generator(&e, "h").unwrap();
        let p = RingMapDescriptor::new(&pn, &e, vec![h], 1).unwrap();

        let big_h = ClassElement::generator(&pn, "H").unwrap();
        assert_eq!(p.pullback(&big_h), e.class_from_text("h").unwrap());
        assert_eq!(p.pullback(&big_h.pow(2)), e.class_from_text("h^2").unwrap());

        // p_*(h') = 1, p_*(1) = 0
        let hp = ClassElement::generator(&e, "h'").unwrap();
        assert_eq!(p.pushforward(&hp).unwrap(), ClassElement::one(&pn));
        assert!(p.pushforward(&ClassElement::one(&e)).unwrap().is_zero());
    }

    #[test]
    fn projection_formula_on_bases() {
        let pn = p2();
        let e = e2();
        let h = ClassElement::generator(&e, "h").unwrap();
        let p = RingMapDescriptor::new(&pn, &e, vec![h], 1).unwrap();
        for xd in (0..=e.top_degree()).step_by(2) {
            for xm in e.basis(xd) {
                let x = ClassElement::monomial(&e, xm.exps());
                let px = p.pushforward(&x).unwrap();
                for yd in (0..=pn.top_degree()).step_by(2) {
                    for ym in pn.basis(yd) {
                        let y = ClassElement::monomial(&pn, ym.exps());
                        let lhs = (&x * &p.pullback(&y)).integrate();
                        let rhs = (&px * &y).integrate();
                        assert_eq!(lhs, rhs, "projection formula at ({xd},{yd})");
                    }
                }
            }
        }
    }

    #[test]
    fn descriptor_validation() {
        let pn = p2();
        let e = e2();
        // wrong shift
        let h = ClassElement::generator(&e, "h").unwrap();
        assert!(RingMapDescriptor::new(&pn, &e, vec![h.clone()], 2).is_err());
        // image of wrong degree
        let h2 = e.class_from_text("h^2").unwrap();
        assert!(matches!(
            RingMapDescriptor::new(&pn, &e, vec![h2], 1),
            Err(RingError::DegreeOverflow { .. })
        ));
        // relation not respected: send H to a class with nonzero cube.
        let product = product_p2();
        let bad = RingPresentation::build(
            "A*(P^4)",
            &[("t", 2)],
            vec![Poly::term(Monomial::new(vec![5]), Rat::one())],
            8,
            Monomial::new(vec![4]),
        )
        .unwrap();
        let t = ClassElement::generator(&bad, "t").unwrap();
        assert!(RingMapDescriptor::new(&product, &bad, vec![t.clone(), t], 0).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let r = e2();
        let text = r.presentation_text();
        let r2 = parse_presentation(&text).unwrap();
        assert_eq!(r2.basis_dims(), r.basis_dims());
        assert_eq!(r2.presentation_text(), text);
    }
}
