//! Machine-readable reports shared by the CLI and the browser demo.
//!
//! Everything numeric is an exact `"p/q"` string; field order is fixed by
//! the struct definitions so identical inputs serialize byte-identically.

use serde::Serialize;

use crate::flop::{
    self, chow_verification, Convention, FlopError, FlopGeometry, VerifyCheck,
};
use crate::localization::{
    BundleSpec, EvalOptions, InvariantOutcome, InvariantQuery, ScanRow, TraceRow,
};
use crate::rational::Rat;
use crate::rings::ClassElement;

#[derive(Debug, Serialize)]
pub struct InvariantReport {
    pub n: u32,
    pub d: u32,
    pub k: u32,
    pub insertions: Vec<u32>,
    pub obstruction: String,
    pub value: String,
    pub graph_count: u64,
    pub seeds: Vec<u64>,
}

impl InvariantReport {
    pub fn new(q: &InvariantQuery, outcome: &InvariantOutcome) -> Self {
        InvariantReport {
            n: q.n,
            d: q.d,
            k: q.k,
            insertions: q.insertions.clone(),
            obstruction: q.obstruction.describe(),
            value: outcome.value.to_string(),
            graph_count: outcome.graph_count,
            seeds: outcome.seeds.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct McoverReport {
    pub value: String,
    pub d: u32,
    pub expected: String,
    pub graph_count: u64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Serialize)]
pub struct FlopMapReport {
    pub image: String,
    pub n: u32,
    pub class: String,
    pub convention: String,
    pub coefficient: String,
}

/// Formats the image as the dual cycle with its sign, e.g. `-1 * (P^1)*`.
pub fn flop_map_report(
    geometry: &FlopGeometry,
    k: u32,
    convention: Convention,
) -> Result<FlopMapReport, FlopError> {
    let image = geometry.flop_t(&geometry.cycle_class(k), convention)?;
    let basis = geometry.dual_ring().basis(2 * (geometry.n() - k));
    let coeff = image.coeff(&basis[0]);
    Ok(FlopMapReport {
        image: format!("{coeff} * (P^{k})*"),
        n: geometry.n(),
        class: format!("P^{k}"),
        convention: convention.name().to_string(),
        coefficient: coeff.to_string(),
    })
}

#[derive(Debug, Serialize)]
pub struct TMapRow {
    pub class: String,
    pub coefficient: String,
    pub image: String,
}

#[derive(Debug, Serialize)]
pub struct GeometryReport {
    pub n: u32,
    pub betti_exceptional: Vec<usize>,
    pub rings: Vec<RingSummary>,
    pub excess_chern: String,
    pub t_map_paper: Vec<TMapRow>,
    pub t_map_chern: Vec<TMapRow>,
    pub self_intersection_paper: String,
    pub self_intersection_chern: String,
}

#[derive(Debug, Serialize)]
pub struct RingSummary {
    pub name: String,
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    pub top_degree: u32,
    pub betti: Vec<usize>,
}

fn ring_summary(ring: &crate::rings::RingPresentation) -> RingSummary {
    let text = ring.presentation_text();
    let relations = text
        .lines()
        .filter_map(|l| l.strip_prefix("rel "))
        .map(|s| s.to_string())
        .collect();
    RingSummary {
        name: ring.name().to_string(),
        generators: ring
            .generators()
            .iter()
            .map(|(g, d)| format!("{g} (degree {d})"))
            .collect(),
        relations,
        top_degree: ring.top_degree(),
        betti: ring.basis_dims(),
    }
}

pub fn geometry_report(geometry: &FlopGeometry) -> Result<GeometryReport, FlopError> {
    let t_rows = |convention: Convention| -> Result<Vec<TMapRow>, FlopError> {
        Ok(geometry
            .flop_t_table(convention)?
            .into_iter()
            .map(|(k, c)| TMapRow {
                class: format!("P^{k}"),
                coefficient: c.to_string(),
                image: format!("{c} * (P^{k})*"),
            })
            .collect())
    };
    Ok(GeometryReport {
        n: geometry.n(),
        betti_exceptional: geometry.exceptional_ring().basis_dims(),
        rings: vec![
            ring_summary(geometry.source_ring()),
            ring_summary(geometry.dual_ring()),
            ring_summary(geometry.product_ring()),
            ring_summary(geometry.exceptional_ring()),
        ],
        excess_chern: geometry.excess_chern().to_string(),
        t_map_paper: t_rows(Convention::Paper)?,
        t_map_chern: t_rows(Convention::Chern)?,
        self_intersection_paper: flop::self_intersection(geometry.n(), Convention::Paper)?
            .to_string(),
        self_intersection_chern: flop::self_intersection(geometry.n(), Convention::Chern)?
            .to_string(),
    })
}

#[derive(Debug, Serialize)]
pub struct VanishingReport {
    pub n: u32,
    pub d_max: u32,
    pub k: u32,
    pub rows: Vec<VanishRowReport>,
    pub all_zero: bool,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Serialize)]
pub struct VanishRowReport {
    pub d: u32,
    pub insertions: Vec<u32>,
    pub value: String,
    pub graph_count: u64,
    pub graphs_with_zero_factor: u64,
}

pub fn vanishing_report(n: u32, d_max: u32, k: u32, rows: &[ScanRow], opts: &EvalOptions) -> VanishingReport {
    use num_traits::Zero;
    VanishingReport {
        n,
        d_max,
        k,
        all_zero: rows.iter().all(|r| r.value.is_zero()),
        rows: rows
            .iter()
            .map(|r| VanishRowReport {
                d: r.d,
                insertions: r.insertions.clone(),
                value: r.value.to_string(),
                graph_count: r.graph_count,
                graphs_with_zero_factor: r.graphs_with_zero_factor,
            })
            .collect(),
        seeds: opts.seeds.clone(),
    }
}

#[derive(Debug, Serialize)]
pub struct RuanTripleReport {
    pub n: u32,
    pub insertions: Vec<u32>,
    pub d_max: u32,
    pub ordinary: String,
    pub series: Vec<SeriesEntry>,
    pub corrected: String,
    pub matches_ordinary: bool,
}

#[derive(Debug, Serialize)]
pub struct SeriesEntry {
    pub d: u32,
    pub psi: String,
}

pub fn ruan_triple_report(
    n: u32,
    d_max: u32,
    triple: (u32, u32, u32),
    series: &[(u32, Rat)],
    classes: (&ClassElement, &ClassElement, &ClassElement),
) -> RuanTripleReport {
    let ordinary = (&(classes.0 * classes.1) * classes.2).integrate();
    let corrected = flop::quantum_corrected_triple(classes.0, classes.1, classes.2, series);
    RuanTripleReport {
        n,
        insertions: vec![triple.0, triple.1, triple.2],
        d_max,
        ordinary: ordinary.to_string(),
        matches_ordinary: corrected == ordinary,
        corrected: corrected.to_string(),
        series: series
            .iter()
            .map(|(d, psi)| SeriesEntry { d: *d, psi: psi.to_string() })
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct ChowVerifyReport {
    pub nmax: u32,
    pub all_passed: bool,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub n: u32,
    pub passed: bool,
    pub detail: String,
}

pub fn chow_verify_report(nmax: u32) -> Result<ChowVerifyReport, FlopError> {
    let checks = chow_verification(nmax)?;
    Ok(ChowVerifyReport {
        nmax,
        all_passed: checks.iter().all(|c| c.passed),
        checks: checks
            .into_iter()
            .map(|VerifyCheck { name, n, passed, detail }| CheckReport { name, n, passed, detail })
            .collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct GraphListReport {
    pub n: u32,
    pub d: u32,
    pub k: u32,
    pub graph_count: u64,
    pub graphs: Vec<GraphRow>,
}

#[derive(Debug, Serialize)]
pub struct GraphRow {
    pub graph: String,
    pub multiplicity: u64,
}

/// Per-graph trace lines as CSV: canonical string, multiplicity, contribution.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("graph,multiplicity,contribution\n");
    for r in rows {
        out.push_str(&format!("\"{}\",{},{}\n", r.graph, r.multiplicity, r.contribution));
    }
    out
}

/// Parse the CLI/browser obstruction syntax: `none`, `cotangent`, or
/// `linesum:a1,a2,...` with every `a_i <= -1`.
pub fn parse_obstruction(s: &str) -> Result<BundleSpec, String> {
    match s {
        "none" => Ok(BundleSpec::None),
        "cotangent" => Ok(BundleSpec::CotangentTarget),
        other => {
            let degrees = other
                .strip_prefix("linesum:")
                .ok_or_else(|| format!("unknown obstruction {other:?}"))?;
            let bundles = degrees
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i32>()
                        .map(crate::localization::LineBundleSpec::new)
                        .map_err(|_| format!("bad line-bundle degree {t:?}"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if bundles.is_empty() {
                return Err("linesum needs at least one degree".into());
            }
            Ok(BundleSpec::LineSum(bundles))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flop::FlopGeometry;

    #[test]
    fn flop_map_image_format() {
        let g = FlopGeometry::build(2).unwrap();
        let r = flop_map_report(&g, 1, Convention::Paper).unwrap();
        assert_eq!(r.image, "-1 * (P^1)*");
        assert_eq!(r.coefficient, "-1");
    }

    #[test]
    fn obstruction_syntax_roundtrip() {
        assert_eq!(parse_obstruction("none").unwrap().describe(), "none");
        assert_eq!(parse_obstruction("cotangent").unwrap().describe(), "cotangent");
        assert_eq!(parse_obstruction("linesum:-1,-1").unwrap().describe(), "linesum:-1,-1");
        assert!(parse_obstruction("linesum:").is_err());
        assert!(parse_obstruction("quadric").is_err());
    }
}
