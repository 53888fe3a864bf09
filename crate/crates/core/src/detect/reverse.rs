use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::detect::{ExpectationEntry, Method, Verdict, WitnessReport, GME_FIDELITY};
use crate::error::Result;
use crate::estimator::{acquire, check_probability, Acquisition};
use crate::pauli::{MeasurementSetting, Pauli, SettingData};
use crate::protocol::{check_even, layer1_pairs, layer2_pairs, prepare_target, SqrtSwapRealization};
use crate::qstate::{MixedState, PureState, QuantumState, TwoQubitGate, MAX_MIXED_QUBITS};
use crate::scalar::Scalar;

/// Two-qubit depolarizing noise after every gate pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateNoise<T> {
    pub p_gate: T,
    pub realization: SqrtSwapRealization,
}

impl<T: Scalar> GateNoise<T> {
    pub fn noiseless() -> Self {
        Self { p_gate: T::zero(), realization: SqrtSwapRealization::CubeOfDagger }
    }

    pub fn depolarizing(p_gate: T) -> Self {
        Self { p_gate, realization: SqrtSwapRealization::CubeOfDagger }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointLabel {
    Neel,
    Layer1,
    Bell,
    Target,
    RevBell,
    RevLayer1,
    RevNeel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Estimator {
    /// Probability of the Néel bitstring in the Z basis.
    Bitstring,
    /// Product over pairs of `(1 + 2<XX> - <ZZ>) / 4`.
    BellPairs,
    /// Product over pairs of `(1 + 2<XY> - <ZZ>) / 4`.
    PhasedPairs,
    /// Not measured directly; inferred from the others.
    Inferred,
}

impl CheckpointLabel {
    fn estimator(self) -> Estimator {
        match self {
            Self::Neel | Self::RevNeel => Estimator::Bitstring,
            Self::Bell | Self::RevBell => Estimator::BellPairs,
            Self::Layer1 | Self::RevLayer1 => Estimator::PhasedPairs,
            Self::Target => Estimator::Inferred,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub label: CheckpointLabel,
    /// Gate pulses applied so far.
    pub gate_count: usize,
    pub exact: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub settings: Vec<String>,
    /// Pair symmetry used by the estimator holds on the simulated state.
    pub symmetry_ok: bool,
    /// The estimator is unbiased on the simulated state: bitstring checkpoints
    /// always, pair checkpoints when the exact fidelity factorizes over pairs.
    pub pair_product_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseSeries {
    pub n: usize,
    pub checkpoints: Vec<Checkpoint>,
    /// Log-linear fit of the measured checkpoints evaluated at the target's gate count.
    pub target_inferred: f64,
    pub target_exact: f64,
}

fn noisy_layer<T: Scalar>(
    rho: &mut MixedState<T>,
    gate: &TwoQubitGate<T>,
    pulses: usize,
    pairs: &[(usize, usize)],
    p: T,
    count: &mut usize,
) -> Result<()> {
    for &(i, j) in pairs {
        for _ in 0..pulses {
            rho.apply_gate_mut(gate, i, j)?;
            rho.depolarize_pair(i, j, p)?;
            *count += 1;
        }
    }
    Ok(())
}

struct PairStats {
    symmetric: bool,
    product: bool,
}

fn pair_stats<T: Scalar>(rho: &MixedState<T>, ideal: &PureState<T>, est: Estimator) -> Result<PairStats> {
    if est == Estimator::Bitstring {
        // fidelity to a basis state is its outcome probability
        return Ok(PairStats { symmetric: true, product: true });
    }
    let n = rho.n_qubits();
    let tol = T::value_tol();
    let mut symmetric = true;
    let mut product = T::one();
    for (a, b) in layer1_pairs(n) {
        let pair = |p: Pauli, q: Pauli| -> Result<T> {
            let mut letters = vec![Pauli::I; n];
            letters[a] = p;
            letters[b] = q;
            rho.expectation(&crate::pauli::PauliString::new(&letters, T::one())?)
        };
        symmetric &= match est {
            Estimator::BellPairs => (pair(Pauli::X, Pauli::X)? - pair(Pauli::Y, Pauli::Y)?).abs() <= tol,
            Estimator::PhasedPairs => (pair(Pauli::X, Pauli::Y)? + pair(Pauli::Y, Pauli::X)?).abs() <= tol,
            _ => true,
        };
        let rdm = rho.reduced_density_matrix(&[a, b])?;
        let ideal_pair = ideal.reduced_density_matrix(&[a, b])?;
        // ideal pairs are pure, so fidelity is Tr(rho_pair P)
        let f: T = rdm
            .matrix()
            .as_slice()
            .iter()
            .zip(ideal_pair.matrix().as_slice())
            .map(|(x, y)| (*x * y.conj()).re)
            .sum();
        product *= f;
    }
    let exact = rho.fidelity(ideal)?;
    Ok(PairStats { symmetric, product: (exact - product).abs() <= tol })
}

fn setting_letters(n: usize, est: Estimator) -> Vec<MeasurementSetting> {
    let z = MeasurementSetting::uniform(n, Pauli::Z).expect("n >= 1");
    match est {
        Estimator::Bitstring | Estimator::Inferred => vec![z],
        Estimator::BellPairs => vec![MeasurementSetting::uniform(n, Pauli::X).expect("n >= 1"), z],
        Estimator::PhasedPairs => {
            let xy = (0..n).map(|s| if s % 2 == 0 { Pauli::X } else { Pauli::Y }).collect();
            vec![MeasurementSetting::new(xy).expect("valid letters"), z]
        }
    }
}

/// Per-shot parity vectors of every pair; one row per outcome with its weight.
fn pair_rows<T: Scalar>(data: &SettingData<T>, n: usize) -> Vec<(Vec<f64>, f64)> {
    let pairs = layer1_pairs(n);
    let row = |o: u64| -> Vec<f64> {
        pairs
            .iter()
            .map(|&(a, b)| {
                let mask = (1u64 << (n - 1 - a)) | (1u64 << (n - 1 - b));
                if (o & mask).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    };
    match data {
        SettingData::Shots(s) => {
            let w = 1.0 / s.len() as f64;
            s.iter().map(|&o| (row(o), w)).collect()
        }
        SettingData::Distribution(p) => p
            .iter()
            .enumerate()
            .filter(|(_, q)| q.to_f64_lossy() != 0.0)
            .map(|(b, q)| (row(b as u64), q.to_f64_lossy()))
            .collect(),
    }
}

/// Mean vector and covariance of the sample mean.
fn mean_cov(rows: &[(Vec<f64>, f64)], shots: Option<usize>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = rows.first().map(|r| r.0.len()).unwrap_or(0);
    let mut mean = vec![0.0; k];
    for (r, w) in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += w * x;
        }
    }
    let mut cov = vec![vec![0.0; k]; k];
    if let Some(m) = shots.filter(|&m| m > 1) {
        for (r, w) in rows {
            for i in 0..k {
                for j in 0..k {
                    cov[i][j] += w * (r[i] - mean[i]) * (r[j] - mean[j]);
                }
            }
        }
        let scale = 1.0 / (m as f64 - 1.0);
        for row in cov.iter_mut() {
            for x in row.iter_mut() {
                *x *= scale;
            }
        }
    }
    (mean, cov)
}

fn quad(g: &[f64], cov: &[Vec<f64>]) -> f64 {
    (0..g.len()).map(|i| (0..g.len()).map(|j| g[i] * cov[i][j] * g[j]).sum::<f64>()).sum()
}

fn estimate_checkpoint<T: Scalar>(
    rho: &MixedState<T>,
    est: Estimator,
    acq: &Acquisition<T>,
    stream_base: u64,
) -> Result<(f64, f64)> {
    let n = rho.n_qubits();
    let settings = setting_letters(n, est);
    let acq = Acquisition { seed: acq.seed.wrapping_add(stream_base), ..*acq };
    let data = acquire(rho, &settings, &acq)?;
    match est {
        Estimator::Inferred => Ok((f64::NAN, f64::NAN)),
        Estimator::Bitstring => {
            let neel: u64 = (0..n).filter(|s| s % 2 == 0).map(|s| 1u64 << (n - 1 - s)).sum();
            match &data[0].1 {
                SettingData::Shots(s) => {
                    let m = s.len() as f64;
                    let p = s.iter().filter(|&&o| o == neel).count() as f64 / m;
                    Ok((p, (p * (1.0 - p) / m).sqrt()))
                }
                SettingData::Distribution(p) => Ok((p[neel as usize].to_f64_lossy(), 0.0)),
            }
        }
        Estimator::BellPairs | Estimator::PhasedPairs => {
            let (xs, xcov) = mean_cov(&pair_rows(&data[0].1, n), acq.shots);
            let (zs, zcov) = mean_cov(&pair_rows(&data[1].1, n), acq.shots);
            let factors: Vec<f64> = xs.iter().zip(&zs).map(|(x, z)| (1.0 + 2.0 * x - z) / 4.0).collect();
            let f: f64 = factors.iter().product();
            // delta method over both settings
            let others = |k: usize| -> f64 { factors.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).product() };
            let gx: Vec<f64> = (0..factors.len()).map(|k| 0.5 * others(k)).collect();
            let gz: Vec<f64> = (0..factors.len()).map(|k| -0.25 * others(k)).collect();
            Ok((f, (quad(&gx, &xcov) + quad(&gz, &zcov)).max(0.0).sqrt()))
        }
    }
}

/// Prepare and reverse under gate noise, reporting exact and setting-estimated
/// fidelities at every checkpoint. Streams are offset per checkpoint so each
/// one draws independent shots.
pub fn reverse_fidelity_series<T: Scalar>(n: usize, noise: &GateNoise<T>, acq: &Acquisition<T>) -> Result<ReverseSeries> {
    check_even(n, 4)?;
    if n > MAX_MIXED_QUBITS {
        return Err(crate::error::Error::RegisterTooLarge(n));
    }
    check_probability("p_gate", noise.p_gate)?;
    let ideal = prepare_target::<T>(n)?;
    let dag = TwoQubitGate::sqrt_swap_dag();
    let (sq, sq_pulses) = match noise.realization {
        SqrtSwapRealization::Direct => (TwoQubitGate::sqrt_swap(), 1),
        SqrtSwapRealization::CubeOfDagger => (dag.clone(), 3),
    };
    let (l1, l2) = (layer1_pairs(n), layer2_pairs(n));
    let p = noise.p_gate;

    let mut rho = ideal.neel.to_mixed()?;
    let mut count = 0usize;
    let mut states: Vec<(CheckpointLabel, usize, MixedState<T>, PureState<T>)> = Vec::new();
    states.push((CheckpointLabel::Neel, count, rho.clone(), ideal.neel.clone()));
    noisy_layer(&mut rho, &dag, 1, &l1, p, &mut count)?;
    states.push((CheckpointLabel::Layer1, count, rho.clone(), ideal.layer1.clone()));
    noisy_layer(&mut rho, &TwoQubitGate::phase(), 1, &l1, p, &mut count)?;
    states.push((CheckpointLabel::Bell, count, rho.clone(), ideal.bell.clone()));
    noisy_layer(&mut rho, &dag, 1, &l2, p, &mut count)?;
    states.push((CheckpointLabel::Target, count, rho.clone(), ideal.target.clone()));
    noisy_layer(&mut rho, &sq, sq_pulses, &l2, p, &mut count)?;
    states.push((CheckpointLabel::RevBell, count, rho.clone(), ideal.bell.clone()));
    noisy_layer(&mut rho, &TwoQubitGate::phase_dag(), 1, &l1, p, &mut count)?;
    states.push((CheckpointLabel::RevLayer1, count, rho.clone(), ideal.layer1.clone()));
    noisy_layer(&mut rho, &sq, sq_pulses, &l1, p, &mut count)?;
    states.push((CheckpointLabel::RevNeel, count, rho, ideal.neel.clone()));

    let mut checkpoints = Vec::with_capacity(states.len());
    for (k, (label, gate_count, state, target)) in states.iter().enumerate() {
        let est = label.estimator();
        let stats = pair_stats(state, target, est)?;
        let (estimate, stderr) = estimate_checkpoint(state, est, acq, 16 * k as u64)?;
        checkpoints.push(Checkpoint {
            label: *label,
            gate_count: *gate_count,
            exact: state.fidelity(target)?.to_f64_lossy(),
            estimate,
            stderr,
            settings: if est == Estimator::Inferred {
                Vec::new()
            } else {
                setting_letters(n, est).iter().map(|s| s.letter_string()).collect()
            },
            symmetry_ok: stats.symmetric,
            pair_product_ok: stats.product,
        });
    }

    // least squares of ln F against gate count over measured checkpoints
    let pts: Vec<(f64, f64)> = checkpoints
        .iter()
        .filter(|c| c.label != CheckpointLabel::Target && c.estimate > 0.0)
        .map(|c| (c.gate_count as f64, c.estimate.ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let target = checkpoints.iter().find(|c| c.label == CheckpointLabel::Target).expect("target checkpoint");
    let target_inferred = (my + slope * (target.gate_count as f64 - mx)).exp();
    let target_exact = target.exact;
    Ok(ReverseSeries { n, checkpoints, target_inferred, target_exact })
}

/// Series packaged as a report. The verdict is only indicative: the inferred
/// fidelity relies on the decay model, not on a witness.
pub fn reverse_report<T: Scalar>(n: usize, noise: &GateNoise<T>, acq: &Acquisition<T>) -> Result<WitnessReport> {
    let series = reverse_fidelity_series(n, noise, acq)?;
    let expectations = series
        .checkpoints
        .iter()
        .filter(|c| c.label != CheckpointLabel::Target)
        .map(|c| ExpectationEntry::new(serde_json::to_value(c.label).expect("label").as_str().unwrap_or(""), c.estimate, c.stderr))
        .collect();
    let mut derived = BTreeMap::new();
    derived.insert("target_inferred".to_string(), series.target_inferred);
    derived.insert("target_exact".to_string(), series.target_exact);
    derived.insert("p_gate".to_string(), noise.p_gate.to_f64_lossy());
    derived.insert("gme_fidelity".to_string(), GME_FIDELITY);
    let verdict = if series.target_inferred > GME_FIDELITY { Verdict::IndicativeGme } else { Verdict::Inconclusive };
    Ok(WitnessReport {
        method: Method::Reverse,
        n,
        expectations,
        derived,
        verdict,
        trace: series.checkpoints.iter().map(|c| serde_json::to_value(c).expect("checkpoint")).collect(),
        seed: acq.shots.map(|_| acq.seed),
        shots: acq.shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_series_is_all_ones() {
        let s = reverse_fidelity_series::<f64>(6, &GateNoise::noiseless(), &Acquisition::exact()).unwrap();
        for c in &s.checkpoints {
            assert!((c.exact - 1.0).abs() < 1e-10, "{:?}", c.label);
            if c.label != CheckpointLabel::Target {
                assert!((c.estimate - 1.0).abs() < 1e-10, "{:?}", c.label);
            }
        }
        assert!((s.target_inferred - 1.0).abs() < 1e-10);
    }

    #[test]
    fn estimators_exact_where_pairs_factorize() {
        let s = reverse_fidelity_series::<f64>(6, &GateNoise::depolarizing(0.02), &Acquisition::exact()).unwrap();
        for c in s.checkpoints.iter().filter(|c| c.label != CheckpointLabel::Target) {
            assert!(c.symmetry_ok, "{:?}", c.label);
            if c.pair_product_ok {
                assert!((c.exact - c.estimate).abs() < 1e-9, "{:?}: {} vs {}", c.label, c.exact, c.estimate);
            }
        }
        let by = |l| s.checkpoints.iter().find(|c| c.label == l).unwrap();
        assert!(by(CheckpointLabel::Bell).pair_product_ok);
        assert!(by(CheckpointLabel::RevNeel).pair_product_ok);
    }

    #[test]
    fn fidelity_decays_after_target() {
        let s = reverse_fidelity_series::<f64>(6, &GateNoise::depolarizing(0.01), &Acquisition::exact()).unwrap();
        let ex: Vec<f64> = s.checkpoints.iter().map(|c| c.exact).collect();
        assert!(ex[3] >= ex[4] && ex[4] >= ex[5] && ex[5] >= ex[6], "{ex:?}");
    }
}
