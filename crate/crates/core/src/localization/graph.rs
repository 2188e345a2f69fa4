//! Fixed-point graphs and their isomorphism-exact enumeration.
//!
//! A torus-fixed genus-0 stable map is a labeled tree: every vertex maps to
//! a fixed point `p_{f_v}` (adjacent vertices to distinct ones), every edge
//! is a `d_alpha`-fold cover of a coordinate line, and the marked points sit
//! on vertices as tails.  Enumeration walks a catalog of unlabeled trees
//! (canonicalized by centroid-rooted AHU codes) and streams every
//! `(labels, degrees, tails)` assignment that is lexicographically minimal
//! in its orbit under the tree's automorphism group, so each isomorphism
//! class is visited exactly once and the automorphism order falls out as the
//! stabilizer size.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{Limits, LocalError};

/// One torus-fixed component of the genus-0 stable-map moduli space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedGraph {
    /// Fixed-point label `f_v` per vertex, in `1..=n+1`.
    labels: Vec<u8>,
    /// Marked points on each vertex as a bitmask (bit `i` = mark `i+1`).
    tails: Vec<u32>,
    /// Edges `(u, v, degree)` with `u < v`.
    edges: Vec<(u8, u8, u32)>,
}

impl FixedGraph {
    pub fn new(labels: Vec<u8>, tails: Vec<u32>, edges: Vec<(u8, u8, u32)>) -> Self {
        FixedGraph { labels, tails, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// 1-based fixed-point label of a vertex.
    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn tail_mask(&self, v: usize) -> u32 {
        self.tails[v]
    }

    /// 1-based marks sitting on a vertex.
    pub fn tail_marks(&self, v: usize) -> Vec<usize> {
        (0..32).filter(|i| self.tails[v] & (1 << i) != 0).map(|i| i + 1).collect()
    }

    pub fn tail_count(&self, v: usize) -> u32 {
        self.tails[v].count_ones()
    }

    pub fn edges(&self) -> &[(u8, u8, u32)] {
        &self.edges
    }

    pub fn total_degree(&self) -> u32 {
        self.edges.iter().map(|(_, _, d)| d).sum()
    }

    /// Number of edges incident to a vertex.
    pub fn valence_edges(&self, v: usize) -> usize {
        self.edges.iter().filter(|(a, b, _)| *a as usize == v || *b as usize == v).count()
    }

    /// Deterministic printable encoding, used for trace files.
    pub fn canonical_string(&self) -> String {
        let labels: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        let tails: Vec<String> = (0..self.labels.len())
            .map(|v| {
                let marks: Vec<String> =
                    self.tail_marks(v).iter().map(|m| m.to_string()).collect();
                format!("{{{}}}", marks.join(","))
            })
            .collect();
        let edges: Vec<String> =
            self.edges.iter().map(|(a, b, d)| format!("{a}-{b}:{d}")).collect();
        format!("V:{};T:{};E:{}", labels.join(","), tails.join(","), edges.join(","))
    }

    /// Check the fixed-graph conditions for a query `(n, d, k)`: tree
    /// connectivity, adjacent labels distinct, edge degrees summing to `d`,
    /// and the tails partitioning `{1..k}`.
    pub fn validate(&self, n: u32, d: u32, k: u32) -> Result<(), LocalError> {
        let v = self.labels.len();
        let bad = |detail: String| Err(LocalError::InvalidQuery { detail });
        if self.edges.len() + 1 != v {
            return bad(format!("{} edges on {} vertices is not a tree", self.edges.len(), v));
        }
        let mut reach = vec![false; v];
        let mut stack = vec![0usize];
        reach[0] = true;
        while let Some(u) = stack.pop() {
            for (a, b, _) in &self.edges {
                let (a, b) = (*a as usize, *b as usize);
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if !reach.iter().all(|r| *r) {
            return bad("graph is not connected".into());
        }
        for (i, l) in self.labels.iter().enumerate() {
            if *l == 0 || *l as u32 > n + 1 {
                return bad(format!("vertex {i} has label {l} outside 1..={}", n + 1));
            }
        }
        for (a, b, deg) in &self.edges {
            if self.labels[*a as usize] == self.labels[*b as usize] {
                return bad(format!("edge {a}-{b} joins equal labels"));
            }
            if *deg == 0 {
                return bad(format!("edge {a}-{b} has degree 0"));
            }
        }
        if self.total_degree() != d {
            return bad(format!("edge degrees sum to {}, not {d}", self.total_degree()));
        }
        let mut seen = 0u32;
        for t in &self.tails {
            if t & seen != 0 {
                return bad("tail sets overlap".into());
            }
            seen |= t;
        }
        let full = if k == 0 { 0 } else { (1u32 << k) - 1 };
        if seen != full {
            return bad(format!("tails cover mask {seen:#b}, expected {full:#b}"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Unlabeled tree catalog
// ---------------------------------------------------------------------------

pub(crate) struct TreeAut {
    pub vperm: Vec<usize>,
    pub eperm: Vec<usize>,
}

pub(crate) struct TreeShape {
    pub n_vertices: usize,
    /// `(min, max)` pairs, sorted.
    pub edges: Vec<(usize, usize)>,
    /// vertex -> list of (neighbor, edge index)
    pub adj: Vec<Vec<(usize, usize)>>,
    pub auts: Vec<TreeAut>,
}

fn build_adjacency(v: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); v];
    for (i, (a, b)) in edges.iter().enumerate() {
        adj[*a].push((*b, i));
        adj[*b].push((*a, i));
    }
    adj
}

fn rooted_code(root: usize, parent: Option<usize>, adj: &[Vec<(usize, usize)>]) -> Vec<u8> {
    let mut child_codes: Vec<Vec<u8>> = adj[root]
        .iter()
        .filter(|(w, _)| Some(*w) != parent)
        .map(|(w, _)| rooted_code(*w, Some(root), adj))
        .collect();
    child_codes.sort();
    let mut code = vec![b'('];
    for c in child_codes {
        code.extend(c);
    }
    code.push(b')');
    code
}

/// Centroid-rooted AHU certificate: equal certificates exactly for
/// isomorphic trees.
fn ahu_certificate(v: usize, edges: &[(usize, usize)]) -> Vec<u8> {
    let adj = build_adjacency(v, edges);
    // subtree sizes from an arbitrary root
    let mut order = Vec::with_capacity(v);
    let mut parent = vec![usize::MAX; v];
    let mut stack = vec![0usize];
    let mut seen = vec![false; v];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for (w, _) in &adj[u] {
            if !seen[*w] {
                seen[*w] = true;
                parent[*w] = u;
                stack.push(*w);
            }
        }
    }
    let mut size = vec![1usize; v];
    for u in order.iter().rev() {
        if parent[*u] != usize::MAX {
            size[parent[*u]] += size[*u];
        }
    }
    let heaviest = |u: usize| -> usize {
        let mut m = v - size[u];
        for (w, _) in &adj[u] {
            if parent[*w] == u {
                m = m.max(size[*w]);
            }
        }
        m
    };
    let best = (0..v).map(heaviest).min().unwrap();
    let centroids: Vec<usize> = (0..v).filter(|u| heaviest(*u) == best).collect();
    match centroids.as_slice() {
        [c] => {
            let mut cert = vec![b'1'];
            cert.extend(rooted_code(*c, None, &adj));
            cert
        }
        [c1, c2] => {
            let a = rooted_code(*c1, Some(*c2), &adj);
            let b = rooted_code(*c2, Some(*c1), &adj);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let mut cert = vec![b'2'];
            cert.extend(lo);
            cert.extend(hi);
            cert
        }
        _ => unreachable!("a tree has at most two centroids"),
    }
}

/// All vertex permutations preserving adjacency, by backtracking with degree
/// pruning.  Exhaustive, which is fine at the tree sizes enumeration allows.
fn tree_automorphisms(v: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let eset: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let has_edge = |a: usize, b: usize| eset.contains(&(a.min(b), a.max(b)));
    let mut degree = vec![0usize; v];
    for (a, b) in edges {
        degree[*a] += 1;
        degree[*b] += 1;
    }
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; v];
    let mut used = vec![false; v];
    fn rec(
        i: usize,
        v: usize,
        degree: &[usize],
        has_edge: &dyn Fn(usize, usize) -> bool,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == v {
            out.push(perm.clone());
            return;
        }
        for w in 0..v {
            if used[w] || degree[w] != degree[i] {
                continue;
            }
            let consistent =
                (0..i).all(|j| has_edge(j, i) == has_edge(perm[j], w));
            if consistent {
                perm[i] = w;
                used[w] = true;
                rec(i + 1, v, degree, has_edge, perm, used, out);
                used[w] = false;
                perm[i] = usize::MAX;
            }
        }
    }
    rec(0, v, &degree, &has_edge, &mut perm, &mut used, &mut out);
    out
}

fn make_shape(v: usize, mut edges: Vec<(usize, usize)>) -> TreeShape {
    edges.sort_unstable();
    let adj = build_adjacency(v, &edges);
    let edge_index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let auts = tree_automorphisms(v, &edges)
        .into_iter()
        .map(|vperm| {
            let eperm = edges
                .iter()
                .map(|(a, b)| {
                    let (x, y) = (vperm[*a], vperm[*b]);
                    edge_index[&(x.min(y), x.max(y))]
                })
                .collect();
            TreeAut { vperm, eperm }
        })
        .collect();
    TreeShape { n_vertices: v, edges, adj, auts }
}

/// Unlabeled trees on `2..=max_vertices` vertices, one representative per
/// isomorphism class, grown by leaf attachment and deduplicated by AHU
/// certificate.
fn tree_catalog(max_vertices: usize) -> Vec<Arc<TreeShape>> {
    let mut catalog: Vec<Arc<TreeShape>> = Vec::new();
    let mut frontier: Vec<Vec<(usize, usize)>> = vec![vec![(0, 1)]];
    catalog.push(Arc::new(make_shape(2, vec![(0, 1)])));
    let mut v = 2;
    while v < max_vertices {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for edges in &frontier {
            for attach in 0..v {
                let mut grown = edges.clone();
                grown.push((attach, v));
                let cert = ahu_certificate(v + 1, &grown);
                if seen.insert(cert) {
                    next.push(grown);
                }
            }
        }
        for edges in &next {
            catalog.push(Arc::new(make_shape(v + 1, edges.clone())));
        }
        frontier = next;
        v += 1;
    }
    catalog
}

// ---------------------------------------------------------------------------
// Assignment enumeration
// ---------------------------------------------------------------------------

/// A tree shape with labels and edge degrees fixed; tails still free.
pub(crate) struct Prefix {
    pub shape: Arc<TreeShape>,
    pub labels: Vec<u8>,
    pub degrees: Vec<u32>,
    /// Indices into `shape.auts` of automorphisms fixing (labels, degrees).
    pub active: Vec<usize>,
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            acc.push(total);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for first in 1..=(total - parts as u32 + 1) {
            acc.push(first);
            rec(total - first, parts - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if parts >= 1 && total >= parts as u32 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

fn labelings(shape: &TreeShape, n_labels: u8) -> Vec<Vec<u8>> {
    fn rec(
        vtx: usize,
        shape: &TreeShape,
        n_labels: u8,
        acc: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if vtx == shape.n_vertices {
            out.push(acc.clone());
            return;
        }
        'candidates: for l in 1..=n_labels {
            for (w, _) in &shape.adj[vtx] {
                if *w < vtx && acc[*w] == l {
                    continue 'candidates;
                }
            }
            acc.push(l);
            rec(vtx + 1, shape, n_labels, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, shape, n_labels, &mut Vec::new(), &mut out);
    out
}

/// Every canonical `(shape, labels, degrees)` prefix for total degree `d`
/// over `n+1` fixed points.
pub(crate) fn enumerate_prefixes(
    n: u32,
    d: u32,
    limits: &Limits,
) -> Result<Vec<Prefix>, LocalError> {
    if d == 0 {
        return Err(LocalError::InvalidQuery { detail: "degree must be >= 1".into() });
    }
    if n == 0 {
        return Err(LocalError::InvalidQuery { detail: "target dimension must be >= 1".into() });
    }
    if n + 1 > u8::MAX as u32 {
        return Err(LocalError::ResourceLimit { detail: format!("n = {n} too large") });
    }
    let needed = d as usize + 1;
    if needed > limits.max_vertices {
        return Err(LocalError::ResourceLimit {
            detail: format!(
                "degree {d} needs trees on up to {needed} vertices; cap is {}",
                limits.max_vertices
            ),
        });
    }
    let mut prefixes = Vec::new();
    for shape in tree_catalog(needed) {
        let e = shape.edges.len();
        for degrees in compositions(d, e) {
            for labels in labelings(&shape, (n + 1) as u8) {
                let mut active = Vec::new();
                let mut minimal = true;
                'auts: for (ai, aut) in shape.auts.iter().enumerate() {
                    let mut tl = vec![0u8; labels.len()];
                    for (i, l) in labels.iter().enumerate() {
                        tl[aut.vperm[i]] = *l;
                    }
                    let mut td = vec![0u32; degrees.len()];
                    for (i, g) in degrees.iter().enumerate() {
                        td[aut.eperm[i]] = *g;
                    }
                    match (tl, td).cmp(&(labels.clone(), degrees.clone())) {
                        std::cmp::Ordering::Less => {
                            minimal = false;
                            break 'auts;
                        }
                        std::cmp::Ordering::Equal => active.push(ai),
                        std::cmp::Ordering::Greater => {}
                    }
                }
                if minimal {
                    prefixes.push(Prefix {
                        shape: Arc::clone(&shape),
                        labels,
                        degrees: degrees.clone(),
                        active,
                    });
                }
            }
        }
    }
    Ok(prefixes)
}

/// Stream every canonical tail assignment of `k` marks over a prefix.
/// The callback receives the graph and its automorphism multiplicity
/// `|Aut(Gamma)| * prod d_alpha`; returns the number of graphs visited.
pub(crate) fn for_each_assignment<F>(
    prefix: &Prefix,
    k: u32,
    f: &mut F,
) -> Result<u64, LocalError>
where
    F: FnMut(&FixedGraph, u64) -> Result<(), LocalError>,
{
    if k > 32 {
        return Err(LocalError::ResourceLimit { detail: format!("k = {k} marks exceed 32") });
    }
    let v = prefix.shape.n_vertices;
    let deck: u64 = prefix.degrees.iter().map(|d| *d as u64).product();
    let edges: Vec<(u8, u8, u32)> = prefix
        .shape
        .edges
        .iter()
        .zip(&prefix.degrees)
        .map(|((a, b), d)| (*a as u8, *b as u8, *d))
        .collect();

    let mut digits = vec![0usize; k as usize];
    let mut count = 0u64;
    loop {
        let mut tails = vec![0u32; v];
        for (mark, vtx) in digits.iter().enumerate() {
            tails[*vtx] |= 1 << mark;
        }
        let mut minimal = true;
        let mut stabilizer = 0u64;
        for ai in &prefix.active {
            let aut = &prefix.shape.auts[*ai];
            let mut tt = vec![0u32; v];
            for (i, t) in tails.iter().enumerate() {
                tt[aut.vperm[i]] = *t;
            }
            match tt.cmp(&tails) {
                std::cmp::Ordering::Less => {
                    minimal = false;
                    break;
                }
                std::cmp::Ordering::Equal => stabilizer += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
        if minimal {
            let graph = FixedGraph::new(prefix.labels.clone(), tails, edges.clone());
            f(&graph, stabilizer * deck)?;
            count += 1;
        }
        // next base-v counter value
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return Ok(count);
            }
            digits[pos] += 1;
            if digits[pos] < v {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Every isomorphism class of fixed graph for `(n, d, k)`, exactly once,
/// in a deterministic order.
pub fn enumerate_fixed_graphs(
    n: u32,
    d: u32,
    k: u32,
    limits: &Limits,
) -> Result<Vec<FixedGraph>, LocalError> {
    let mut out = Vec::new();
    for prefix in enumerate_prefixes(n, d, limits)? {
        for_each_assignment(&prefix, k, &mut |g, _| {
            if out.len() as u64 >= limits.max_graphs {
                return Err(LocalError::ResourceLimit {
                    detail: format!("graph count exceeds cap {}", limits.max_graphs),
                });
            }
            out.push(g.clone());
            Ok(())
        })?;
    }
    Ok(out)
}

/// `|Aut(Gamma)| * prod_alpha d_alpha` by brute-force permutation matching:
/// automorphisms must preserve labels, tail sets, adjacency, and edge
/// degrees.  The deck factor counts the covering transformations of each
/// edge.
pub fn automorphism_multiplicity(g: &FixedGraph) -> Result<u64, LocalError> {
    let v = g.vertex_count();
    if v > 16 {
        return Err(LocalError::ResourceLimit {
            detail: format!("automorphism search on {v} vertices exceeds the cap of 16"),
        });
    }
    let edge_deg: HashMap<(usize, usize), u32> = g
        .edges()
        .iter()
        .map(|(a, b, d)| ((*a as usize, *b as usize), *d))
        .collect();
    let lookup = |a: usize, b: usize| edge_deg.get(&(a.min(b), a.max(b))).copied();

    fn rec(
        i: usize,
        v: usize,
        g: &FixedGraph,
        lookup: &dyn Fn(usize, usize) -> Option<u32>,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        count: &mut u64,
    ) {
        if i == v {
            *count += 1;
            return;
        }
        for w in 0..v {
            if used[w] || g.labels[i] != g.labels[w] || g.tails[i] != g.tails[w] {
                continue;
            }
            if (0..i).all(|j| lookup(j, i) == lookup(perm[j], w)) {
                perm[i] = w;
                used[w] = true;
                rec(i + 1, v, g, lookup, perm, used, count);
                used[w] = false;
            }
        }
    }
    let mut count = 0u64;
    rec(0, v, g, &lookup, &mut vec![usize::MAX; v], &mut vec![false; v], &mut count);
    let deck: u64 = g.edges().iter().map(|(_, _, d)| *d as u64).product();
    Ok(count * deck)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn single_possibility_for_a_line() {
        let gs = enumerate_fixed_graphs(1, 1, 0, &limits()).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].edges(), &[(0, 1, 1)]);
        assert_eq!(gs[0].labels, vec![1, 2]);
    }

    #[test]
    fn degree_two_on_p1_gives_three_graphs() {
        let gs = enumerate_fixed_graphs(1, 2, 0, &limits()).unwrap();
        assert_eq!(gs.len(), 3);
        // one double cover and the two broken covers 1-2-1 and 2-1-2
        let double_covers = gs.iter().filter(|g| g.edge_count() == 1).count();
        let paths = gs.iter().filter(|g| g.edge_count() == 2).count();
        assert_eq!((double_covers, paths), (1, 2));
    }

    #[test]
    fn lines_in_p2() {
        // one graph per coordinate line l_ij
        let gs = enumerate_fixed_graphs(2, 1, 0, &limits()).unwrap();
        assert_eq!(gs.len(), 3);
    }

    #[test]
    fn every_graph_validates() {
        for (n, d, k) in [(1, 3, 0), (2, 2, 3), (3, 1, 2)] {
            for g in enumerate_fixed_graphs(n, d, k, &limits()).unwrap() {
                g.validate(n, d, k).unwrap();
            }
        }
    }

    #[test]
    fn automorphism_examples() {
        // single edge of degree d: no symmetry, deck factor d
        for d in 1..=4 {
            let g = FixedGraph::new(vec![1, 2], vec![0, 0], vec![(0, 1, d)]);
            assert_eq!(automorphism_multiplicity(&g).unwrap(), d as u64);
        }
        // path 1-2-1 with unit degrees: the end swap
        let path = FixedGraph::new(vec![1, 2, 1], vec![0, 0, 0], vec![(0, 1, 1), (1, 2, 1)]);
        assert_eq!(automorphism_multiplicity(&path).unwrap(), 2);
        // a tail on the middle vertex is fixed by the swap
        let marked = FixedGraph::new(vec![1, 2, 1], vec![0, 1, 0], vec![(0, 1, 1), (1, 2, 1)]);
        assert_eq!(automorphism_multiplicity(&marked).unwrap(), 2);
        // a tail on one end breaks the symmetry
        let broken = FixedGraph::new(vec![1, 2, 1], vec![1, 0, 0], vec![(0, 1, 1), (1, 2, 1)]);
        assert_eq!(automorphism_multiplicity(&broken).unwrap(), 1);
    }

    #[test]
    fn streamed_multiplicity_matches_brute_force() {
        for (n, d, k) in [(1, 3, 0), (2, 2, 2), (2, 1, 3)] {
            for prefix in enumerate_prefixes(n, d, &limits()).unwrap() {
                for_each_assignment(&prefix, k, &mut |g, mult| {
                    assert_eq!(mult, automorphism_multiplicity(g).unwrap(), "{}", g.canonical_string());
                    Ok(())
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn resource_limits_enforced() {
        let tight = Limits { max_vertices: 3, max_graphs: 10 };
        assert!(matches!(
            enumerate_fixed_graphs(1, 4, 0, &tight),
            Err(LocalError::ResourceLimit { .. })
        ));
        let tiny = Limits { max_vertices: 10, max_graphs: 1 };
        assert!(matches!(
            enumerate_fixed_graphs(1, 2, 0, &tiny),
            Err(LocalError::ResourceLimit { .. })
        ));
    }

    // Independent oracle: decode every Pruefer sequence into a labeled tree,
    // put every admissible assignment on it, and reduce by pairwise
    // isomorphism over all vertex permutations.
    fn brute_force_classes(n: u32, d: u32, k: u32) -> usize {
        fn prufer_trees(v: usize) -> Vec<Vec<(usize, usize)>> {
            if v == 2 {
                return vec![vec![(0, 1)]];
            }
            let mut out = Vec::new();
            let len = v - 2;
            let mut seq = vec![0usize; len];
            loop {
                // decode
                let mut degree = vec![1usize; v];
                for s in &seq {
                    degree[*s] += 1;
                }
                let mut edges = Vec::new();
                let mut deg = degree.clone();
                let mut seq_full = seq.clone();
                for i in 0..len {
                    let leaf = (0..v).find(|x| deg[*x] == 1).unwrap();
                    edges.push((leaf.min(seq_full[i]), leaf.max(seq_full[i])));
                    deg[leaf] -= 1;
                    deg[seq_full[i]] -= 1;
                }
                let rest: Vec<usize> = (0..v).filter(|x| deg[*x] == 1).collect();
                edges.push((rest[0].min(rest[1]), rest[0].max(rest[1])));
                seq_full.clear();
                out.push(edges);
                // increment
                let mut pos = 0;
                loop {
                    if pos == len {
                        return out;
                    }
                    seq[pos] += 1;
                    if seq[pos] < v {
                        break;
                    }
                    seq[pos] = 0;
                    pos += 1;
                }
            }
        }

        fn canonical_key(g: &FixedGraph) -> String {
            let v = g.vertex_count();
            let mut perm: Vec<usize> = (0..v).collect();
            let mut best: Option<String> = None;
            permute(&mut perm, 0, &mut |p| {
                let mut labels = vec![0u8; v];
                let mut tails = vec![0u32; v];
                for i in 0..v {
                    labels[p[i]] = g.labels[i];
                    tails[p[i]] = g.tails[i];
                }
                let mut edges: Vec<(usize, usize, u32)> = g
                    .edges()
                    .iter()
                    .map(|(a, b, d)| {
                        let (x, y) = (p[*a as usize], p[*b as usize]);
                        (x.min(y), x.max(y), *d)
                    })
                    .collect();
                edges.sort_unstable();
                let key = format!("{labels:?}|{tails:?}|{edges:?}");
                if best.as_ref().map(|b| key < *b).unwrap_or(true) {
                    best = Some(key);
                }
            });
            best.unwrap()
        }

        fn permute(perm: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
            if i == perm.len() {
                f(perm);
                return;
            }
            for j in i..perm.len() {
                perm.swap(i, j);
                permute(perm, i + 1, f);
                perm.swap(i, j);
            }
        }

        let mut keys = HashSet::new();
        for v in 2..=(d as usize + 1) {
            for edges in prufer_trees(v) {
                let mut sorted = edges.clone();
                sorted.sort_unstable();
                for degrees in compositions(d, sorted.len()) {
                    // all labelings, not only canonical ones
                    let mut labelings = Vec::new();
                    fn rec_labels(
                        vtx: usize,
                        v: usize,
                        n_labels: u8,
                        edges: &[(usize, usize)],
                        acc: &mut Vec<u8>,
                        out: &mut Vec<Vec<u8>>,
                    ) {
                        if vtx == v {
                            out.push(acc.clone());
                            return;
                        }
                        'l: for l in 1..=n_labels {
                            for (a, b) in edges {
                                let (a, b) = (*a, *b);
                                if (a == vtx && b < vtx && acc[b] == l)
                                    || (b == vtx && a < vtx && acc[a] == l)
                                {
                                    continue 'l;
                                }
                            }
                            acc.push(l);
                            rec_labels(vtx + 1, v, n_labels, edges, acc, out);
                            acc.pop();
                        }
                    }
                    rec_labels(0, v, (n + 1) as u8, &sorted, &mut Vec::new(), &mut labelings);
                    for labels in labelings {
                        let mut digits = vec![0usize; k as usize];
                        loop {
                            let mut tails = vec![0u32; v];
                            for (mark, vtx) in digits.iter().enumerate() {
                                tails[*vtx] |= 1 << mark;
                            }
                            let g = FixedGraph::new(
                                labels.clone(),
                                tails,
                                sorted
                                    .iter()
                                    .zip(&degrees)
                                    .map(|((a, b), d)| (*a as u8, *b as u8, *d))
                                    .collect(),
                            );
                            keys.insert(canonical_key(&g));
                            let mut pos = 0;
                            loop {
                                if pos == digits.len() {
                                    break;
                                }
                                digits[pos] += 1;
                                if digits[pos] < v {
                                    break;
                                }
                                digits[pos] = 0;
                                pos += 1;
                            }
                            if pos == digits.len() {
                                break;
                            }
                        }
                    }
                }
            }
        }
        keys.len()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for d in 1..=3 {
            let fast = enumerate_fixed_graphs(1, d, 0, &limits()).unwrap().len();
            let slow = brute_force_classes(1, d, 0);
            assert_eq!(fast, slow, "graph class count at (n=1, d={d}, k=0)");
        }
        // also with labels and marks in play
        assert_eq!(
            enumerate_fixed_graphs(2, 2, 1, &limits()).unwrap().len(),
            brute_force_classes(2, 2, 1)
        );
    }
}
