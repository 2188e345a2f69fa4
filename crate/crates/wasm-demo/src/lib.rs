//! Browser demo bindings: three interactive views over the exact engines,
//! each returning a JSON string the static page renders into tables.
//!
//! Build for the web with
//! `wasm-pack build crates/wasm-demo --target web --out-dir www/pkg`
//! and serve `crates/wasm-demo/www/`.  The functions are plain Rust and are
//! unit-tested natively; wasm-bindgen only supplies the JS glue.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use flopgw_core::flop::{Convention, FlopGeometry};
use flopgw_core::localization::{
    invariant, vanishing_scan, BundleSpec, EvalOptions, InvariantQuery, LineBundleSpec,
};
use flopgw_core::rational::rat_pow;
use flopgw_core::report::{geometry_report, vanishing_report, McoverReport};

#[derive(Serialize)]
struct DemoError {
    error: String,
}

fn json_or_error<T: Serialize, E: std::fmt::Display>(r: Result<T, E>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| {
            serde_json::to_string(&DemoError { error: e.to_string() }).unwrap()
        }),
        Err(e) => serde_json::to_string(&DemoError { error: e.to_string() }).unwrap(),
    }
}

/// Flop-correspondence explorer: the four Chow rings, the excess Chern
/// class, and the T-map tables under both sign conventions.
#[wasm_bindgen]
pub fn flop_geometry_json(n: u32) -> String {
    json_or_error(FlopGeometry::build(n).and_then(|g| geometry_report(&g)))
}

/// Multiple-cover calculator: `M_d` with its graph count and the expected
/// `1/d^3`, certified across three seeds.
#[wasm_bindgen]
pub fn multiple_cover_json(d: u32) -> String {
    let run = || -> Result<McoverReport, flopgw_core::localization::LocalError> {
        let opts = EvalOptions::default();
        let q = InvariantQuery::new(
            1,
            d,
            vec![],
            BundleSpec::LineSum(vec![LineBundleSpec::new(-1), LineBundleSpec::new(-1)]),
        );
        let outcome = invariant(&q, &opts)?;
        Ok(McoverReport {
            value: outcome.value.to_string(),
            d,
            expected: rat_pow(&flopgw_core::rational::rat_int(d as i64), 3)
                .recip()
                .to_string(),
            graph_count: outcome.graph_count,
            seeds: outcome.seeds,
        })
    };
    json_or_error(run())
}

/// Vanishing scan: every dimension-balanced cotangent-obstruction query up
/// to `d_max`, each exactly zero with the zero weight present on every
/// graph.
#[wasm_bindgen]
pub fn vanishing_scan_json(n: u32, d_max: u32) -> String {
    let opts = EvalOptions::default();
    json_or_error(
        vanishing_scan(n, d_max, 3, &opts)
            .map(|rows| vanishing_report(n, d_max, 3, &rows, &opts)),
    )
}

/// Self-intersection of the exceptional `P^n` under a chosen convention;
/// a tiny endpoint for the explorer's convention toggle.
#[wasm_bindgen]
pub fn self_intersection_json(n: u32, convention: &str) -> String {
    #[derive(Serialize)]
    struct SelfIntersection {
        n: u32,
        convention: String,
        value: String,
    }
    let run = || -> Result<SelfIntersection, String> {
        let conv: Convention = convention.parse()?;
        let value =
            flopgw_core::flop::self_intersection(n, conv).map_err(|e| e.to_string())?;
        Ok(SelfIntersection {
            n,
            convention: conv.name().to_string(),
            value: value.to_string(),
        })
    };
    json_or_error(run())
}
