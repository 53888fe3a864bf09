//! Report assembly and file writing. Everything here is single-threaded and
//! emits fields in a fixed order, so equal configurations give equal bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use sqswap_core::detect::{WitnessReport, SCHEMA_VERSION};
use sqswap_core::hubbard::{exchange_period, fast_gate_interaction, fast_gate_time, gate_sweep, GateSweepRow};
use sqswap_core::noise::{certification_threshold, fig5_subsets, sweep, Figure, SweepObservable, SweepTable};
use sqswap_core::protocol::{support_report, target_state, SupportReport};
use sqswap_core::qstate::{Bipartition, MAX_MIXED_QUBITS};
use sqswap_core::VERSION;

use crate::{Failure, FigureArg, Format, RunConfig};

#[derive(Debug, Serialize)]
struct Envelope<'a, B: Serialize> {
    schema_version: u32,
    version: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: B,
}

fn envelope<B: Serialize>(config: &RunConfig, body: B) -> Envelope<'_, B> {
    Envelope { schema_version: SCHEMA_VERSION, version: VERSION, config, body }
}

fn to_json<B: Serialize>(value: &B) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// `out.json` next to a CSV file.
fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Numerical(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Numerical(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct CutEntry {
    pub cut: usize,
    pub lambda1: f64,
    pub purity: f64,
}

#[derive(Debug, Serialize)]
pub struct PrepareSummary {
    n: usize,
    support: SupportReport,
    /// Largest Schmidt weight over every bipartition searched.
    max_lambda1: f64,
    max_lambda1_part: Vec<usize>,
    /// `all` up to the density-matrix size limit, `single_boundary` beyond it.
    cuts_searched: &'static str,
    single_boundary_cuts: Vec<CutEntry>,
    /// `[index, re, im]` for every non-zero amplitude.
    amplitudes: Vec<(usize, f64, f64)>,
}

pub fn prepare_summary(n: usize) -> Result<PrepareSummary, Failure> {
    let psi = target_state::<f64>(n)?;
    let mut single = Vec::with_capacity(n - 1);
    for k in 1..n {
        let lambda = psi.schmidt_spectrum(&Bipartition::single_boundary(n, k)?)?;
        single.push(CutEntry { cut: k, lambda1: lambda[0], purity: lambda.iter().map(|l| l * l).sum() });
    }
    let (cuts, cuts_searched) = if n <= MAX_MIXED_QUBITS {
        (Bipartition::all(n), "all")
    } else {
        ((1..n).map(|k| Bipartition::single_boundary(n, k)).collect::<Result<_, _>>()?, "single_boundary")
    };
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for cut in &cuts {
        let l = psi.largest_schmidt_weight(cut)?;
        if l > best.0 {
            best = (l, cut.part().to_vec());
        }
    }
    let amplitudes = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(k, a)| (k, a.re, a.im))
        .collect();
    Ok(PrepareSummary {
        n,
        support: support_report(&psi),
        max_lambda1: best.0,
        max_lambda1_part: best.1,
        cuts_searched,
        single_boundary_cuts: single,
        amplitudes,
    })
}

pub fn emit_prepare(config: &RunConfig, summary: &PrepareSummary, out: Option<&Path>) -> Result<(), Failure> {
    match config.format {
        Format::Json => write(out, &to_json(&envelope(config, summary))?),
        Format::Csv => write(out, &csv_bytes(&summary.single_boundary_cuts)?),
    }
}

#[derive(Debug, Serialize)]
struct WitnessBody<'a> {
    report: &'a WitnessReport,
}

#[derive(Debug, Serialize)]
struct WitnessRow<'a> {
    label: &'a str,
    value: f64,
    stderr: Option<f64>,
}

pub fn emit_witness(config: &RunConfig, report: &WitnessReport, out: Option<&Path>) -> Result<(), Failure> {
    match config.format {
        Format::Json => write(out, &to_json(&envelope(config, WitnessBody { report }))?),
        Format::Csv => {
            let rows: Vec<WitnessRow> = report
                .expectations
                .iter()
                .map(|e| WitnessRow { label: &e.label, value: e.value, stderr: Some(e.stderr) })
                .chain(report.derived.iter().map(|(k, v)| WitnessRow { label: k, value: *v, stderr: None }))
                .collect();
            write(out, &csv_bytes(&rows)?)
        }
    }
}

pub fn figure(arg: FigureArg) -> Option<Figure> {
    match arg {
        FigureArg::Fig5a => Some(Figure::Fig5a),
        FigureArg::Fig5b => Some(Figure::Fig5b),
        FigureArg::Fig5c => Some(Figure::Fig5c),
        FigureArg::Hubbard => None,
    }
}

#[derive(Debug, Serialize)]
struct SweepBody<'a> {
    table: &'a SweepTable,
    /// Start of the grid tail on which the certification walk closes.
    certification_threshold: Option<f64>,
}

#[derive(Debug, Serialize)]
struct HubbardBody<'a> {
    j: f64,
    rows: &'a [GateSweepRow],
}

/// `(V/J, t)` points: the fast-gate time `pi / V` and the slow-gate time `T / 8` for each ratio.
fn hubbard_points(j: f64) -> Vec<(f64, f64)> {
    let ratios = [fast_gate_interaction(j) / j, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    ratios
        .iter()
        .flat_map(|&r| [(r, fast_gate_time(r * j)), (r, exchange_period(j, r * j) / 8.0)])
        .collect()
}

pub fn emit_sweep(config: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let (csv, json) = match config.figure.and_then(figure) {
        Some(fig) => {
            let observable = SweepObservable::Homogeneous(fig5_subsets(config.n));
            let grid = fig.grid::<f64>();
            let table = sweep(config.n, fig.param(), &grid, &config.noise, &observable, config.shots, config.seed.unwrap_or(0))?;
            let threshold = certification_threshold(config.n, fig.param(), &grid, &config.noise)?;
            let body = SweepBody { table: &table, certification_threshold: threshold };
            (csv_bytes(&table.rows)?, to_json(&envelope(config, body))?)
        }
        None => {
            let j = 1.0;
            let rows = gate_sweep(j, &hubbard_points(j))?;
            (csv_bytes(&rows)?, to_json(&envelope(config, HubbardBody { j, rows: &rows }))?)
        }
    };
    match (config.format, out) {
        (Format::Json, _) => write(out, &json),
        (Format::Csv, Some(path)) => {
            write(Some(path), &csv)?;
            write(Some(&sidecar(path)), &json)
        }
        (Format::Csv, None) => write(None, &csv),
    }
}
