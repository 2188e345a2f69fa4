//! Genus-0 torus localization on moduli of stable maps to `P^n`.
//!
//! The diagonal torus acting on `P^n` with generic weights
//! `-lambda_1, ..., -lambda_{n+1}` fixes finitely many points `p_i` and the
//! coordinate lines `l_ij`; a torus-fixed stable map is recorded by a
//! labeled tree ([`FixedGraph`]): vertices carry fixed-point labels and
//! marked-point tails, edges carry covering degrees.  The Bott residue
//! formula turns an invariant into an exact rational sum of per-graph
//! contributions -- the Kontsevich weight formula times insertion and
//! obstruction-bundle Euler factors, divided by the automorphism
//! multiplicity.
//!
//! Weights are never treated symbolically: each invariant is evaluated at
//! several independently sampled generic rational weight vectors, and exact
//! agreement across seeds certifies that the (degree-0 homogeneous) sum is
//! the invariant.

mod contribution;
mod graph;
mod invariant;
mod weights;

pub use contribution::{
    cotangent_obstruction_factors, graph_contribution, line_h1_weights, BundleSpec,
    LineBundleSpec,
};
pub use graph::{automorphism_multiplicity, enumerate_fixed_graphs, FixedGraph};
pub use invariant::{
    invariant, invariant_traced, kontsevich_recursion_n, mukai_correction_series,
    multiple_cover, multiple_cover_with_lift, vanishing_scan, EvalOptions, InvariantOutcome,
    InvariantQuery, ScanRow, TraceRow,
};
pub use weights::{sample_generic_weights, WeightVector};

use std::fmt;

/// Resource caps for graph enumeration; overridable from the CLI.
#[derive(Debug, Clone)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_graphs: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: 10, max_graphs: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalError {
    /// A line bundle of non-negative degree was offered as an obstruction.
    NotConcave { degree: i32 },
    /// Graph count or vertex count exceeded the configured cap.
    ResourceLimit { detail: String },
    /// A zero denominator was hit while evaluating a contribution; the
    /// weight vector is not generic for this query and must be resampled.
    GenericityFailure,
    /// The query violates the dimension balance
    /// `sum m_i + rank(Phi) = n + (n+1)d + k - 3`.
    DimensionMismatch { expected: i64, got: i64 },
    /// Two generic weight vectors produced different totals.  Never expected;
    /// signals an implementation bug, not bad input.
    SeedDisagreement { seed_a: u64, seed_b: u64, value_a: String, value_b: String },
    InvalidQuery { detail: String },
    InvalidLift { detail: String },
}

impl fmt::Display for LocalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalError::NotConcave { degree } => {
                write!(f, "bundle degree {degree} is not concave (need degree <= -1)")
            }
            LocalError::ResourceLimit { detail } => write!(f, "resource limit: {detail}"),
            LocalError::GenericityFailure => {
                write!(f, "weight vector is not generic for this query")
            }
            LocalError::DimensionMismatch { expected, got } => write!(
                f,
                "dimension balance violated: insertions plus obstruction rank give {got}, moduli dimension is {expected}"
            ),
            LocalError::SeedDisagreement { seed_a, seed_b, value_a, value_b } => write!(
                f,
                "seeds {seed_a} and {seed_b} disagree: {value_a} vs {value_b} (implementation bug)"
            ),
            LocalError::InvalidQuery { detail } => write!(f, "invalid query: {detail}"),
            LocalError::InvalidLift { detail } => write!(f, "invalid equivariant lift: {detail}"),
        }
    }
}

impl std::error::Error for LocalError {}
