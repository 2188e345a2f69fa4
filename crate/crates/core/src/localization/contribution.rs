//! Per-graph localization contributions: the genus-0 weight formula,
//! obstruction-bundle Euler factors, and insertion factors.
//!
//! Conventions (fixed by the multiple-cover and divisor validations, and by
//! the diagonal action with weights `-lambda` on the homogeneous
//! coordinates): the tangent line of `P^n` at `p_i` along `l_ij` has weight
//! `lambda_i - lambda_j`, so a flag `F = (v, alpha)` has
//! `w_F = (lambda_{f_v} - lambda_{f_u}) / d_alpha`; the equivariant
//! hyperplane class restricts to `+lambda_i` at `p_i`; the cotangent fiber
//! at `p_i` has weights `-(lambda_i - lambda_m)`; the trivial bundle `V*`
//! has weights `+lambda_m`; and an equivariant lift of `O(a)` on a target
//! line takes fiber weight `a lambda_m + c` at `p_m` for a character shift
//! `c`.

use num_traits::{One, Zero};

use super::graph::automorphism_multiplicity;
use super::{FixedGraph, LocalError, WeightVector};
use crate::rational::{factorial, rat_int, rat_pow, sign, Rat};

/// Obstruction bundle of an invariant query.
#[derive(Debug, Clone, PartialEq)]
pub enum BundleSpec {
    /// No obstruction; plain Gromov-Witten numbers.
    None,
    /// The concave bundle `T*P^n` pulled back from the target; its `H^1`
    /// Euler class carries a zero weight on every non-contracted component.
    CotangentTarget,
    /// A direct sum of concave line bundles on the target (multiple covers:
    /// `O(-1) + O(-1)` on `P^1`).
    LineSum(Vec<LineBundleSpec>),
}

/// One concave line bundle `O(degree)` with an explicit equivariant lift
/// `mu_m = degree * lambda_m + lift_shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBundleSpec {
    pub degree: i32,
    pub lift_shift: Rat,
}

impl LineBundleSpec {
    pub fn new(degree: i32) -> Self {
        LineBundleSpec { degree, lift_shift: Rat::zero() }
    }

    pub fn with_shift(degree: i32, lift_shift: Rat) -> Self {
        LineBundleSpec { degree, lift_shift }
    }

    fn lift(&self, label: usize, lambda: &WeightVector) -> Rat {
        rat_int(self.degree as i64) * lambda.lambda(label) + &self.lift_shift
    }
}

impl BundleSpec {
    pub fn describe(&self) -> String {
        match self {
            BundleSpec::None => "none".into(),
            BundleSpec::CotangentTarget => "cotangent".into(),
            BundleSpec::LineSum(bundles) => {
                let degs: Vec<String> =
                    bundles.iter().map(|b| b.degree.to_string()).collect();
                format!("linesum:{}", degs.join(","))
            }
        }
    }
}

/// Torus weights of `H^1(C_alpha, f*O(a))` for a degree-`d_alpha` cover of
/// the line `l_ij`, computed from the two-chart Cech complex: the list
/// `mu_i + k (lambda_i - lambda_j)/d_alpha` for `k = 1 .. -a d_alpha - 1`.
pub fn line_h1_weights(
    a: i32,
    label_i: usize,
    label_j: usize,
    d_alpha: u32,
    mu_i: &Rat,
    mu_j: &Rat,
    lambda: &WeightVector,
) -> Result<Vec<Rat>, LocalError> {
    if a > -1 {
        return Err(LocalError::NotConcave { degree: a });
    }
    let diff = lambda.lambda(label_i) - lambda.lambda(label_j);
    if mu_i - mu_j != rat_int(a as i64) * &diff {
        return Err(LocalError::InvalidLift {
            detail: format!(
                "mu_i - mu_j must equal {a} (lambda_{label_i} - lambda_{label_j})"
            ),
        });
    }
    let dim = (-(a as i64)) * d_alpha as i64 - 1;
    let tangent = diff / rat_int(d_alpha as i64);
    Ok((1..=dim).map(|k| mu_i + &tangent * rat_int(k)).collect())
}

/// Torus weights of `H^1(C, f*T*P^n)` assembled from the normalization
/// sequence: per edge the block `{0} u H^1(C_alpha, O(-d_alpha) (x) V*)`,
/// and per vertex `val_edges - 1` copies of the cotangent fiber block
/// `{-(lambda_{f_v} - lambda_m)}`.  The multiset always has size
/// `(n+1) d - n` and contains one zero per edge.
pub fn cotangent_obstruction_factors(g: &FixedGraph, lambda: &WeightVector) -> Vec<Rat> {
    let n_plus_1 = lambda.lambdas.len();
    let mut weights = Vec::new();
    for (u, v, d) in g.edges() {
        let (i, j) = (g.label(*u as usize), g.label(*v as usize));
        // the H^0(C_alpha, O) term of the Euler-sequence boundary
        weights.push(Rat::zero());
        let tangent =
            (lambda.lambda(i) - lambda.lambda(j)) / rat_int(*d as i64);
        // f*O(-1) has fiber weight -lambda_i over x_i; tensoring with the
        // V* summand of weight +lambda_m gives base weight lambda_m - lambda_i
        for m in 1..=n_plus_1 {
            for k in 1..*d {
                weights.push(
                    lambda.lambda(m) - lambda.lambda(i) + &tangent * rat_int(k as i64),
                );
            }
        }
    }
    for v in 0..g.vertex_count() {
        let copies = g.valence_edges(v) as i64 - 1;
        let i = g.label(v);
        for _ in 0..copies {
            for m in 1..=n_plus_1 {
                if m != i {
                    weights.push(-(lambda.lambda(i) - lambda.lambda(m)));
                }
            }
        }
    }
    weights
}

/// Edge factor of the weight formula:
/// `(-1)^d (d / (lambda_i - lambda_j))^{2d} / (d!)^2` times
/// `prod_{m != i,j} prod_{a+b=d} 1 / ((a lambda_i + b lambda_j)/d - lambda_m)`.
pub(crate) fn edge_factor(
    label_i: usize,
    label_j: usize,
    d: u32,
    lambda: &WeightVector,
) -> Result<Rat, LocalError> {
    let diff = lambda.lambda(label_i) - lambda.lambda(label_j);
    if diff.is_zero() {
        return Err(LocalError::GenericityFailure);
    }
    let d_rat = rat_int(d as i64);
    let mut factor = sign(d as u64) * rat_pow(&(&d_rat / &diff), 2 * d as i64);
    let fact = Rat::from_integer(factorial(d as u64));
    factor /= &fact * &fact;
    for m in 1..=lambda.lambdas.len() {
        if m == label_i || m == label_j {
            continue;
        }
        for a in 0..=d {
            let b = d - a;
            let denom = (lambda.lambda(label_i) * rat_int(a as i64)
                + lambda.lambda(label_j) * rat_int(b as i64))
                / &d_rat
                - lambda.lambda(m);
            if denom.is_zero() {
                return Err(LocalError::GenericityFailure);
            }
            factor /= denom;
        }
    }
    Ok(factor)
}

/// Tail-independent vertex data: flag-weight inverse sum and product, and
/// the fixed-tangent weight product `prod_{m != f_v} (lambda_{f_v} - lambda_m)`.
pub(crate) struct VertexData {
    pub edge_flags: u32,
    pub inv_sum: Rat,
    pub inv_prod: Rat,
    pub weight_prod: Rat,
}

pub(crate) fn vertex_data(g: &FixedGraph, v: usize, lambda: &WeightVector) -> VertexData {
    let i = g.label(v);
    let mut inv_sum = Rat::zero();
    let mut inv_prod = Rat::one();
    let mut edge_flags = 0u32;
    for (a, b, d) in g.edges() {
        let other = if *a as usize == v {
            *b as usize
        } else if *b as usize == v {
            *a as usize
        } else {
            continue;
        };
        let w = (lambda.lambda(i) - lambda.lambda(g.label(other))) / rat_int(*d as i64);
        inv_sum += w.clone().recip();
        inv_prod *= w.recip();
        edge_flags += 1;
    }
    let mut weight_prod = Rat::one();
    for m in 1..=lambda.lambdas.len() {
        if m != i {
            weight_prod *= lambda.lambda(i) - lambda.lambda(m);
        }
    }
    VertexData { edge_flags, inv_sum, inv_prod, weight_prod }
}

/// Vertex factor at a given tail count:
/// `(sum_F w_F^{-1})^{val-3} prod_F w_F^{-1} prod_{m != f_v}
/// (lambda_{f_v} - lambda_m)^{e_v - 1}`, where the valence
/// `val = edge_flags + tails` counts marked points but the fixed-tangent
/// exponent `e_v - 1` counts only edge flags (tails are not nodes, so they
/// do not add copies of `H^0(T_p)`; with the tail count included the sum
/// would not be homogeneous of degree zero).  Negative exponents follow the
/// formal reading (a 1-valent vertex contributes `w_F`, a 2-valent one
/// `1/(w_1 + w_2)`), so a vanishing inverse sum at valence < 3 is a
/// genericity failure.
pub(crate) fn vertex_factor(data: &VertexData, tails: u32) -> Result<Rat, LocalError> {
    let val = (data.edge_flags + tails) as i64;
    let s_exp = val - 3;
    if data.inv_sum.is_zero() && s_exp < 0 {
        return Err(LocalError::GenericityFailure);
    }
    Ok(rat_pow(&data.inv_sum, s_exp)
        * &data.inv_prod
        * rat_pow(&data.weight_prod, data.edge_flags as i64 - 1))
}

/// Euler-class factor of the obstruction bundle restricted to the fixed
/// component: the product of all its torus weights.
pub(crate) fn obstruction_factor(
    spec: &BundleSpec,
    g: &FixedGraph,
    lambda: &WeightVector,
) -> Result<Rat, LocalError> {
    match spec {
        BundleSpec::None => Ok(Rat::one()),
        BundleSpec::CotangentTarget => {
            Ok(cotangent_obstruction_factors(g, lambda).into_iter().product())
        }
        BundleSpec::LineSum(bundles) => {
            let mut factor = Rat::one();
            for bundle in bundles {
                if bundle.degree > -1 {
                    return Err(LocalError::NotConcave { degree: bundle.degree });
                }
                for (u, v, d) in g.edges() {
                    let (i, j) = (g.label(*u as usize), g.label(*v as usize));
                    let mu_i = bundle.lift(i, lambda);
                    let mu_j = bundle.lift(j, lambda);
                    for w in
                        line_h1_weights(bundle.degree, i, j, *d, &mu_i, &mu_j, lambda)?
                    {
                        factor *= w;
                    }
                }
                // normalization-sequence flag terms minus one vertex H^0 block
                for v in 0..g.vertex_count() {
                    let copies = g.valence_edges(v) as i64 - 1;
                    let mu = bundle.lift(g.label(v), lambda);
                    factor *= rat_pow(&mu, copies.max(0));
                }
            }
            Ok(factor)
        }
    }
}

/// Full contribution of one fixed graph to an invariant: weight formula
/// times insertion and obstruction factors, divided by the automorphism
/// multiplicity.  `insertions[i]` is the hyperplane power attached to mark
/// `i+1`.
pub fn graph_contribution(
    g: &FixedGraph,
    insertions: &[u32],
    obstruction: &BundleSpec,
    lambda: &WeightVector,
) -> Result<Rat, LocalError> {
    let mult = automorphism_multiplicity(g)?;
    let mut total = Rat::one();
    for (u, v, d) in g.edges() {
        total *= edge_factor(g.label(*u as usize), g.label(*v as usize), *d, lambda)?;
    }
    for v in 0..g.vertex_count() {
        let data = vertex_data(g, v, lambda);
        total *= vertex_factor(&data, g.tail_count(v))?;
    }
    for v in 0..g.vertex_count() {
        let l = g.label(v);
        for mark in g.tail_marks(v) {
            let power = insertions[mark - 1];
            total *= rat_pow(lambda.lambda(l), power as i64);
        }
    }
    total *= obstruction_factor(obstruction, g, lambda)?;
    Ok(total / rat_int(mult as i64))
}
