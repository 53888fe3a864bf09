use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{certification_schedule, run_certification, HomogeneousValue, GME_FIDELITY};
use crate::error::{Error, Result};
use crate::noise::{spin_flip_weights, ExpectationTable, NoiseParams, TrajectorySampler};
use crate::pauli::{conjugated_stabilizers, MeasurementSetting, Pauli, PauliString};
use crate::protocol::check_even;
use crate::scalar::Scalar;

/// Grid resolution used for threshold read-off.
pub const SWEEP_STEP: f64 = 0.001;

const PARAMS: [&str; 4] = ["p_white", "p_sf", "p_ms", "p_es"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepObservable {
    /// Homogeneous-correlation value on each listed subset.
    Homogeneous(Vec<Vec<usize>>),
    /// Stabilizer lower bound on the target fidelity.
    FidelityBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub subset: String,
    pub witness_value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub n: usize,
    pub param: String,
    pub fixed: NoiseParams<f64>,
    pub observable: SweepObservable,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub rows: Vec<SweepRow>,
    /// First crossing of the detection level per subset label.
    pub crossings: BTreeMap<String, Option<f64>>,
}

fn subset_label(s: &[usize]) -> String {
    format!("[{}]", s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// Subsets of sizes `2, 4, ..., n-2` in the two shapes used by the
/// certification walk, plus the whole register.
pub fn fig5_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for m in (2..n).step_by(2) {
        out.push((0..m).collect());
        let mut second: Vec<usize> = (0..m - 1).collect();
        second.push(m);
        out.push(second);
    }
    out.push((0..n).collect());
    out
}

/// Linear interpolation of the first crossing of `level`.
pub fn crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    for i in 0..xs.len().min(ys.len()) {
        if ys[i] == level {
            return Some(xs[i]);
        }
        if i + 1 < xs.len() {
            let (a, b) = (ys[i] - level, ys[i + 1] - level);
            if a * b < 0.0 {
                return Some(xs[i] + (xs[i + 1] - xs[i]) * a / (a - b));
            }
        }
    }
    None
}

fn homogeneous_strings<T: Scalar>(n: usize, subsets: &[Vec<usize>]) -> Result<Vec<PauliString<T>>> {
    let mut obs = Vec::with_capacity(3 * subsets.len());
    for s in subsets {
        if s.len() % 2 == 1 {
            return Err(Error::OddSubset(s.len()));
        }
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            obs.push(PauliString::homogeneous(n, s, p)?);
        }
    }
    Ok(obs)
}

fn check_grid<T: Scalar>(param: &str, grid: &[T], fixed: &NoiseParams<T>) -> Result<Vec<NoiseParams<T>>> {
    if !PARAMS.contains(&param) {
        return Err(Error::UnknownParameter(param.to_string()));
    }
    if grid.is_empty() {
        return Err(Error::Parse("empty sweep grid".into()));
    }
    grid.iter().map(|&v| fixed.with(param, v)).collect()
}

fn to_f64_params<T: Scalar>(p: &NoiseParams<T>) -> NoiseParams<f64> {
    NoiseParams {
        p_white: p.p_white.to_f64_lossy(),
        p_sf: p.p_sf.to_f64_lossy(),
        p_ms: p.p_ms.to_f64_lossy(),
        p_es: p.p_es.to_f64_lossy(),
    }
}

/// Evaluate `observable` at every grid value of `param`.
///
/// Exact values come from the basis-state expectation table. With `shots`
/// set, homogeneous values are sampled by trajectories; grid point `g` and
/// basis `k` use RNG stream `3 g + k` of `seed`, so rows do not depend on
/// scheduling.
pub fn sweep<T: Scalar>(
    n: usize,
    param: &str,
    grid: &[T],
    fixed: &NoiseParams<T>,
    observable: &SweepObservable,
    shots: Option<usize>,
    seed: u64,
) -> Result<SweepTable> {
    check_even(n, 4)?;
    let points = check_grid(param, grid, fixed)?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let level;
    match observable {
        SweepObservable::Homogeneous(subsets) => {
            level = 1.0;
            let strings = homogeneous_strings::<T>(n, subsets)?;
            let per_point: Vec<Vec<(T, T)>> = match shots {
                None => {
                    let table = ExpectationTable::build(n, strings)?;
                    points
                        .par_iter()
                        .map(|p| -> Result<Vec<(T, T)>> {
                            let e = table.expectations(p)?;
                            Ok(e.chunks(3).map(|c| (c[0].abs() + c[1].abs() + c[2].abs(), T::zero())).collect())
                        })
                        .collect::<Result<_>>()?
                }
                Some(m) => points
                    .par_iter()
                    .enumerate()
                    .map(|(g, p)| -> Result<Vec<(T, T)>> {
                        let mut outs = Vec::with_capacity(3);
                        for (k, b) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
                            let mut s = TrajectorySampler::new(n, MeasurementSetting::uniform(n, b)?, *p)?;
                            outs.push(s.sample_stream(m, seed, 3 * g as u64 + k as u64)?);
                        }
                        Ok(strings
                            .chunks(3)
                            .map(|c| {
                                let (mut gamma, mut var) = (T::zero(), T::zero());
                                for (obs, o) in c.iter().zip(&outs) {
                                    let mt = T::of_usize(o.len());
                                    let plus = o.iter().filter(|&&x| obs.outcome_parity(x) == 1).count();
                                    let mean = (T::of(2.0) * T::of_usize(plus) - mt) / mt;
                                    gamma += mean.abs();
                                    var += (T::one() - mean * mean) / (mt - T::one());
                                }
                                (gamma, var.sqrt())
                            })
                            .collect())
                    })
                    .collect::<Result<_>>()?,
            };
            for (v, vals) in grid.iter().zip(&per_point) {
                for (s, (w, e)) in subsets.iter().zip(vals) {
                    rows.push(SweepRow {
                        param: param.to_string(),
                        value: v.to_f64_lossy(),
                        subset: subset_label(s),
                        witness_value: w.to_f64_lossy(),
                        stderr: e.to_f64_lossy(),
                    });
                }
            }
        }
        SweepObservable::FidelityBound => {
            level = GME_FIDELITY;
            if shots.is_some() {
                return Err(Error::Parse("shot-based sweeps support homogeneous observables only".into()));
            }
            let stabs = conjugated_stabilizers::<T>(n)?;
            let strings: Vec<PauliString<T>> = stabs.iter().flat_map(|s| s.terms().iter().cloned()).collect();
            let table = ExpectationTable::build(n, strings.iter().map(|s| s.with_weight(T::one())).collect())?;
            for (v, p) in grid.iter().zip(&points) {
                let e = table.expectations(p)?;
                let half_sum: T = strings.iter().zip(&e).map(|(s, x)| s.weight() * *x).sum::<T>() * T::of(0.5);
                let bound = half_sum - (T::of_usize(n / 2) - T::one());
                rows.push(SweepRow {
                    param: param.to_string(),
                    value: v.to_f64_lossy(),
                    subset: "bound".into(),
                    witness_value: bound.to_f64_lossy(),
                    stderr: 0.0,
                });
            }
        }
    }
    let mut crossings = BTreeMap::new();
    let mut labels: Vec<String> = rows.iter().map(|r| r.subset.clone()).collect();
    labels.dedup();
    labels.sort();
    labels.dedup();
    for l in labels {
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.subset == l).map(|r| (r.value, r.witness_value)).unzip();
        crossings.insert(l, crossing(&xs, &ys, level));
    }
    Ok(SweepTable {
        n,
        param: param.to_string(),
        fixed: to_f64_params(fixed),
        observable: observable.clone(),
        shots,
        seed: shots.map(|_| seed),
        rows,
        crossings,
    })
}

/// Smallest grid value from which the certification walk closes at every
/// later grid point, using exact noisy values.
pub fn certification_threshold<T: Scalar>(n: usize, param: &str, grid: &[T], fixed: &NoiseParams<T>) -> Result<Option<f64>> {
    let points = check_grid(param, grid, fixed)?;
    let schedule = certification_schedule(n)?;
    let table = ExpectationTable::build(n, homogeneous_strings::<T>(n, &schedule)?)?;
    let closed: Vec<bool> = points
        .par_iter()
        .map(|p| -> Result<bool> {
            let w = spin_flip_weights(n, p.p_sf)?;
            let cert = run_certification(n, |subset| {
                let k = schedule.iter().position(|s| s == subset).expect("subset from schedule");
                let e: Vec<T> = (0..3).map(|j| table.expectation(3 * k + j, &w, p)).collect();
                Ok(HomogeneousValue::from_parts(subset.to_vec(), e[0], e[1], e[2]))
            })?;
            Ok(cert.closed)
        })
        .collect::<Result<_>>()?;
    let mut threshold = None;
    for (v, c) in grid.iter().zip(&closed).rev() {
        if !c {
            break;
        }
        threshold = Some(v.to_f64_lossy());
    }
    Ok(threshold)
}

/// The three noise panels: one swept parameter each, the others fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// Spin-flip preparation.
    Fig5a,
    /// Readout errors.
    Fig5b,
    /// Entangling failure at fixed preparation and readout errors.
    Fig5c,
}

impl Figure {
    pub fn param(self) -> &'static str {
        match self {
            Self::Fig5a => "p_sf",
            Self::Fig5b => "p_ms",
            Self::Fig5c => "p_es",
        }
    }

    pub fn fixed<T: Scalar>(self) -> NoiseParams<T> {
        match self {
            Self::Fig5a | Self::Fig5b => NoiseParams::default(),
            Self::Fig5c => NoiseParams { p_sf: T::of(0.98), p_ms: T::of(0.985), ..NoiseParams::default() },
        }
    }

    /// Inclusive grid at [`SWEEP_STEP`] spacing.
    pub fn grid<T: Scalar>(self) -> Vec<T> {
        let lo = match self {
            Self::Fig5a | Self::Fig5b => 0.9,
            Self::Fig5c => 0.5,
        };
        let steps = ((1.0 - lo) / SWEEP_STEP).round() as usize;
        (0..=steps).map(|k| T::of(lo + k as f64 * SWEEP_STEP)).collect()
    }
}
