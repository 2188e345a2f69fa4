//! `flopgw` -- command-line front end for the Mukai-flop Chow calculus and
//! the genus-0 localization engine.
//!
//! Every subcommand emits one JSON object on stdout (compact, fixed field
//! order, every numeric value an exact `"p/q"` string), so identical
//! invocations with identical seeds are byte-identical.  Exit codes:
//! 0 success, 2 validation failure (with a machine-readable error object),
//! 1 internal assertion failure such as a seed disagreement.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use flopgw_core::flop::{Convention, FlopGeometry};
use flopgw_core::localization::{
    automorphism_multiplicity, enumerate_fixed_graphs, invariant, invariant_traced,
    mukai_correction_series, multiple_cover_with_lift, vanishing_scan, BundleSpec,
    EvalOptions, InvariantQuery, Limits, LineBundleSpec, LocalError, TraceRow,
};
use flopgw_core::rational::{parse_rat, rat_int, rat_pow};
use flopgw_core::report::{
    chow_verify_report, flop_map_report, geometry_report, parse_obstruction,
    ruan_triple_report, trace_csv, vanishing_report, GraphListReport, GraphRow,
    InvariantReport, McoverReport,
};
use flopgw_core::rings::ClassElement;

#[derive(Parser)]
#[command(
    name = "flopgw",
    about = "Exact Mukai-flop cohomology correspondences and genus-0 localization invariants",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Seeds for the generic-weight certification (comma separated).
    #[arg(long, global = true, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
    seeds: Vec<u64>,
    /// Worker threads for the graph summation.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output format; csv applies to per-graph traces and scan tables.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write a per-graph contribution trace (CSV) to this file.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Cap on enumerated graphs.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    max_graphs: u64,
    /// Cap on tree vertices per graph.
    #[arg(long, global = true, default_value_t = 10)]
    max_vertices: usize,
}

impl Common {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            seeds: self.seeds.clone(),
            jobs: self.jobs,
            limits: Limits { max_vertices: self.max_vertices, max_graphs: self.max_graphs },
            max_resamples: 16,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify the ring kernel and every correspondence identity up to nmax.
    ChowVerify {
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
    /// Image of a cycle class under the corrected flop correspondence T.
    FlopMap {
        #[arg(long)]
        n: u32,
        /// Cycle class: "P1", "P^1", or "pt".
        #[arg(long)]
        class: String,
        #[arg(long, default_value = "paper")]
        convention: String,
    },
    /// Summary of the four Chow rings and the T-map tables for one n.
    FlopGeometry {
        #[arg(long)]
        n: u32,
    },
    /// Enumerate the torus-fixed graphs for (n, d, marks).
    LocGraphs {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        marks: u32,
    },
    /// One localization invariant from a full query.
    LocInvariant {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Hyperplane powers at the marks, e.g. "2,2,1".
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        insertions: Vec<u32>,
        /// none | cotangent | linesum:a1,a2,...
        #[arg(long, default_value = "none")]
        obstruction: String,
    },
    /// Multiple-cover contribution M_d of a (-1,-1) rational curve.
    Mcover {
        #[arg(long)]
        d: u32,
        /// Character shift for the equivariant lifts of both O(-1) summands.
        #[arg(long, default_value = "0")]
        lift_shift: String,
    },
    /// Scan every dimension-balanced cotangent-obstruction query; all zero.
    Vanishing {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        dmax: u32,
        #[arg(long, default_value_t = 3)]
        marks: u32,
    },
    /// Quantum-corrected triple product on P^n against its ordinary value.
    RuanTriple {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        dmax: u32,
        /// The three hyperplane powers, e.g. "2,1,1".
        #[arg(long, value_delimiter = ',')]
        insertions: Vec<u32>,
    },
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

enum CliError {
    /// Bad parameters: exit 2.
    Validation(String),
    /// Internal assertion (seed disagreement, failed verification): exit 1.
    Internal(String),
}

impl From<LocalError> for CliError {
    fn from(e: LocalError) -> Self {
        match e {
            LocalError::SeedDisagreement { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<flopgw_core::flop::FlopError> for CliError {
    fn from(e: flopgw_core::flop::FlopError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<flopgw_core::rings::RingError> for CliError {
    fn from(e: flopgw_core::rings::RingError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Print one line, exiting quietly when the downstream pipe has closed.
fn out_line(line: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout();
    if writeln!(stdout, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let json = serde_json::to_string(value)
        .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
    out_line(&json);
    Ok(())
}

fn parse_class(s: &str) -> Result<u32, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("pt") {
        return Ok(0);
    }
    let number = s
        .strip_prefix("P^")
        .or_else(|| s.strip_prefix('P'))
        .ok_or_else(|| CliError::Validation(format!("cannot parse class {s:?}")))?;
    number
        .parse()
        .map_err(|_| CliError::Validation(format!("cannot parse class {s:?}")))
}

fn write_trace(path: &PathBuf, rows: &[TraceRow]) -> Result<(), CliError> {
    fs::write(path, trace_csv(rows))
        .map_err(|e| CliError::Validation(format!("cannot write trace file: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = cli.common.options();
    match cli.command {
        Command::ChowVerify { nmax } => {
            if nmax < 2 {
                return Err(CliError::Validation("nmax must be at least 2".into()));
            }
            let report = chow_verify_report(nmax)?;
            emit(&report)?;
            if !report.all_passed {
                return Err(CliError::Internal("verification checks failed".into()));
            }
            Ok(())
        }
        Command::FlopMap { n, class, convention } => {
            let convention: Convention = convention.parse().map_err(CliError::Validation)?;
            let k = parse_class(&class)?;
            let geometry = FlopGeometry::build(n)?;
            if k > n {
                return Err(CliError::Validation(format!("P^{k} does not embed in P^{n}")));
            }
            emit(&flop_map_report(&geometry, k, convention)?)
        }
        Command::FlopGeometry { n } => {
            let geometry = FlopGeometry::build(n)?;
            emit(&geometry_report(&geometry)?)
        }
        Command::LocGraphs { n, d, marks } => {
            let graphs = enumerate_fixed_graphs(n, d, marks, &opts.limits)?;
            let rows = graphs
                .iter()
                .map(|g| {
                    Ok(GraphRow {
                        graph: g.canonical_string(),
                        multiplicity: automorphism_multiplicity(g)?,
                    })
                })
                .collect::<Result<Vec<_>, LocalError>>()?;
            if cli.common.format == "csv" {
                out_line("graph,multiplicity");
                for r in &rows {
                    out_line(&format!("\"{}\",{}", r.graph, r.multiplicity));
                }
                Ok(())
            } else {
                emit(&GraphListReport {
                    n,
                    d,
                    k: marks,
                    graph_count: rows.len() as u64,
                    graphs: rows,
                })
            }
        }
        Command::LocInvariant { n, d, insertions, obstruction } => {
            let obstruction = parse_obstruction(&obstruction).map_err(CliError::Validation)?;
            let q = InvariantQuery::new(n, d, insertions, obstruction);
            let outcome = if let Some(path) = &cli.common.trace {
                let mut rows = Vec::new();
                let outcome = invariant_traced(&q, &opts, &mut rows)?;
                write_trace(path, &rows)?;
                outcome
            } else {
                invariant(&q, &opts)?
            };
            emit(&InvariantReport::new(&q, &outcome))
        }
        Command::Mcover { d, lift_shift } => {
            let shift = parse_rat(&lift_shift).map_err(CliError::Validation)?;
            let value = multiple_cover_with_lift(d, shift.clone(), &opts)?;
            let q = InvariantQuery::new(
                1,
                d,
                vec![],
                BundleSpec::LineSum(vec![
                    LineBundleSpec::with_shift(-1, shift.clone()),
                    LineBundleSpec::with_shift(-1, shift),
                ]),
            );
            let outcome = invariant(&q, &opts)?;
            let d3 = rat_pow(&rat_int(d as i64), 3);
            emit(&McoverReport {
                value: value.to_string(),
                d,
                expected: d3.recip().to_string(),
                graph_count: outcome.graph_count,
                seeds: opts.seeds.clone(),
            })
        }
        Command::Vanishing { n, dmax, marks } => {
            let rows = vanishing_scan(n, dmax, marks, &opts)?;
            let report = vanishing_report(n, dmax, marks, &rows, &opts);
            if cli.common.format == "csv" {
                out_line("d,insertions,value,graph_count,graphs_with_zero_factor");
                for r in &report.rows {
                    let ins: Vec<String> = r.insertions.iter().map(|m| m.to_string()).collect();
                    out_line(&format!(
                        "{},\"{}\",{},{},{}",
                        r.d,
                        ins.join(","),
                        r.value,
                        r.graph_count,
                        r.graphs_with_zero_factor
                    ));
                }
            } else {
                emit(&report)?;
            }
            if !report.all_zero {
                return Err(CliError::Internal(
                    "a cotangent-obstruction invariant came out nonzero".into(),
                ));
            }
            Ok(())
        }
        Command::RuanTriple { n, dmax, insertions } => {
            if insertions.len() != 3 {
                return Err(CliError::Validation(
                    "ruan-triple needs exactly three insertions".into(),
                ));
            }
            let (a, b, c) = (insertions[0], insertions[1], insertions[2]);
            if a > n || b > n || c > n {
                return Err(CliError::Validation(format!(
                    "hyperplane powers must be at most n = {n}"
                )));
            }
            let geometry = FlopGeometry::build(n)?;
            let series = mukai_correction_series(n, dmax, (a, b, c), &opts)?;
            let ring = geometry.source_ring();
            let ca = ClassElement::monomial(ring, &[a]);
            let cb = ClassElement::monomial(ring, &[b]);
            let cc = ClassElement::monomial(ring, &[c]);
            let report = ruan_triple_report(n, dmax, (a, b, c), &series, (&ca, &cb, &cc));
            emit(&report)?;
            if !report.matches_ordinary {
                return Err(CliError::Internal(
                    "quantum-corrected triple differs from the ordinary triple".into(),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(message)) => {
            let report = ErrorReport { error: ErrorBody { kind: "validation", message } };
            out_line(&serde_json::to_string(&report).unwrap());
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            let report = ErrorReport { error: ErrorBody { kind: "internal", message } };
            out_line(&serde_json::to_string(&report).unwrap());
            ExitCode::from(1)
        }
    }
}
