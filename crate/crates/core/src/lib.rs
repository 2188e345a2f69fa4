//! Exact-arithmetic engine for the cohomology of Mukai flops.
//!
//! Two computations live here, both carried out over arbitrary-precision
//! rationals with no floating point anywhere:
//!
//! * [`rings`] and [`flop`] build finitely presented graded Chow rings for
//!   `P^n`, `(P^n)*`, their product, and the incidence divisor `E`, and use
//!   excess-intersection Chern calculus on the blowup to compute the flop
//!   correspondence `T` on the exceptional locus, together with the
//!   quantum-corrected triple product evaluated at `q = -1`.
//! * [`localization`] computes genus-0 Gromov-Witten-type invariants of
//!   `P^n` twisted by concave obstruction bundles via torus localization:
//!   fixed-point graph enumeration, the Kontsevich weight formula, and the
//!   Bott residue summation.  This reproduces the multiple-cover numbers
//!   `1/d^3` and the vanishing of all cotangent-obstruction invariants.
//!
//! Determinism is part of the contract: identical seeds produce identical
//! results, and every invariant is certified by exact agreement across
//! independently sampled generic torus weights.

pub mod flop;
pub mod localization;
pub mod rational;
pub mod report;
pub mod rings;
