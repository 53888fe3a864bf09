//! Finite-shot sampling in local measurement settings.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{MeasurementSetting, Pauli, PauliString, SettingData};
use crate::qstate::QuantumState;
use crate::scalar::{c, Scalar, C};

/// Single-site unitary mapping the eigenbasis of `basis` onto the Z basis.
pub fn basis_rotation<T: Scalar>(basis: Pauli) -> [[C<T>; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match basis {
        Pauli::I | Pauli::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        Pauli::X => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        // H S†
        Pauli::Y => [[c(h, 0.0), c(0.0, -h)], [c(h, 0.0), c(0.0, h)]],
    }
}

/// Born distribution of outcomes in `setting`.
pub fn setting_distribution<T: Scalar, S: QuantumState<T>>(state: &S, setting: &MeasurementSetting) -> Result<Vec<T>> {
    let n = state.n_qubits();
    if setting.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, got: setting.n_qubits() });
    }
    let mut rotated = state.clone();
    for (site, &b) in setting.bases().iter().enumerate() {
        if b != Pauli::Z {
            rotated.apply_local_mut(&basis_rotation(b), site)?;
        }
    }
    Ok(rotated.basis_probabilities())
}

/// Outcomes of one setting. Bit `n - 1 - s` of an outcome is site `s`; a set
/// bit is the `-1` eigenvalue of that site's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    pub setting: MeasurementSetting,
    pub outcomes: Vec<u64>,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Serialize, Deserialize)]
struct ShotRecordLine {
    setting: MeasurementSetting,
    n: usize,
    shots: usize,
    seed: u64,
    stream: u64,
    outcomes: String,
}

impl ShotRecord {
    pub fn shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.setting.n_qubits()
    }

    pub fn to_setting_data<T>(&self) -> SettingData<T> {
        SettingData::Shots(self.outcomes.clone())
    }

    /// One JSON object, outcomes packed MSB-first at `n` bits per shot.
    pub fn to_json_line(&self) -> String {
        let n = self.n_qubits();
        let mut bytes = vec![0u8; (self.outcomes.len() * n).div_ceil(8)];
        let mut pos = 0usize;
        for &o in &self.outcomes {
            for k in (0..n).rev() {
                if (o >> k) & 1 == 1 {
                    bytes[pos / 8] |= 0x80 >> (pos % 8);
                }
                pos += 1;
            }
        }
        let line = ShotRecordLine {
            setting: self.setting.clone(),
            n,
            shots: self.outcomes.len(),
            seed: self.seed,
            stream: self.stream,
            outcomes: B64.encode(bytes),
        };
        serde_json::to_string(&line).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let l: ShotRecordLine = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        if l.setting.n_qubits() != l.n {
            return Err(Error::DimensionMismatch { expected: l.n, got: l.setting.n_qubits() });
        }
        let bytes = B64.decode(&l.outcomes).map_err(|e| Error::Parse(e.to_string()))?;
        if bytes.len() * 8 < l.shots * l.n {
            return Err(Error::Parse("outcome payload too short".into()));
        }
        let mut outcomes = Vec::with_capacity(l.shots);
        let mut pos = 0usize;
        for _ in 0..l.shots {
            let mut o = 0u64;
            for _ in 0..l.n {
                o = (o << 1) | u64::from(bytes[pos / 8] & (0x80 >> (pos % 8)) != 0);
                pos += 1;
            }
            outcomes.push(o);
        }
        Ok(Self { setting: l.setting, outcomes, seed: l.seed, stream: l.stream })
    }
}

/// Write records as JSON lines.
pub fn to_json_lines(records: &[ShotRecord]) -> String {
    records.iter().map(|r| r.to_json_line() + "\n").collect()
}

pub fn from_json_lines(text: &str) -> Result<Vec<ShotRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(ShotRecord::from_json_line).collect()
}

/// RNG for record `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw `shots` outcomes from a precomputed distribution by CDF inversion.
pub fn sample_distribution<T: Scalar, R: rand::Rng + ?Sized>(probs: &[T], shots: usize, rng: &mut R) -> Result<Vec<u64>> {
    let w: Vec<f64> = probs.iter().map(|p| p.to_f64_lossy().max(0.0)).collect();
    let dist = WeightedIndex::new(&w).map_err(|e| Error::Numerical(format!("outcome distribution: {e}")))?;
    Ok((0..shots).map(|_| dist.sample(rng) as u64).collect())
}

/// Sample `shots` outcomes of `setting`; the RNG stream is `stream` of `seed`.
pub fn sample<T: Scalar, S: QuantumState<T>>(
    state: &S,
    setting: &MeasurementSetting,
    shots: usize,
    seed: u64,
    stream: u64,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::Numerical("at least one shot required".into()));
    }
    if state.n_qubits() > 64 {
        return Err(Error::RegisterTooLarge(state.n_qubits()));
    }
    let probs = setting_distribution(state, setting)?;
    let mut rng = stream_rng(seed, stream);
    let outcomes = sample_distribution(&probs, shots, &mut rng)?;
    Ok(ShotRecord { setting: setting.clone(), outcomes, seed, stream })
}

/// Weighted sample mean of the string's parity and its standard error.
pub fn estimate_pauli<T: Scalar>(record: &ShotRecord, string: &PauliString<T>) -> Result<(T, T)> {
    if !record.setting.resolves(string) {
        return Err(Error::Unresolvable(string.letter_string()));
    }
    if record.outcomes.is_empty() {
        return Err(Error::Numerical("record has no shots".into()));
    }
    let m = T::of_usize(record.shots());
    let plus = record.outcomes.iter().filter(|&&o| string.outcome_parity(o) == 1).count();
    let mean_parity = (T::of_usize(plus) * T::of(2.0) - m) / m;
    let var = if record.shots() > 1 {
        // unbiased sample variance of a ±1 variable
        (T::one() - mean_parity * mean_parity) * m / (m - T::one())
    } else {
        T::zero()
    };
    let w = string.weight();
    Ok((w * mean_parity, w.abs() * (var.max(T::zero()) / m).sqrt()))
}

/// Readout noise on an exact distribution: every site is reported wrongly
/// with probability `1 - p_correct`.
pub fn flip_distribution<T: Scalar>(probs: &[T], n: usize, p_correct: T) -> Result<Vec<T>> {
    check_probability("p_ms", p_correct)?;
    if probs.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, got: probs.len() });
    }
    let mut p = probs.to_vec();
    if p_correct == T::one() {
        return Ok(p);
    }
    let q = T::one() - p_correct;
    for site in 0..n {
        let m = 1usize << (n - 1 - site);
        for b in (0..p.len()).filter(|b| b & m == 0) {
            let (a, c) = (p[b], p[b | m]);
            p[b] = p_correct * a + q * c;
            p[b | m] = p_correct * c + q * a;
        }
    }
    Ok(p)
}

/// Readout noise on sampled outcomes.
pub fn flip_outcomes<T: Scalar, R: rand::Rng + ?Sized>(outcomes: &mut [u64], n: usize, p_correct: T, rng: &mut R) -> Result<()> {
    check_probability("p_ms", p_correct)?;
    let q = (T::one() - p_correct).to_f64_lossy();
    if q == 0.0 {
        return Ok(());
    }
    for o in outcomes.iter_mut() {
        for k in 0..n {
            if rng.gen_bool(q) {
                *o ^= 1 << k;
            }
        }
    }
    Ok(())
}

pub(crate) fn check_probability<T: Scalar>(name: &'static str, p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::ProbabilityOutOfRange { name, value: p.to_f64_lossy() });
    }
    Ok(())
}

/// How setting data is obtained from a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Acquisition<T> {
    /// `None` means exact outcome distributions.
    pub shots: Option<usize>,
    pub seed: u64,
    /// Probability that a single-site readout is correct.
    pub p_ms: T,
}

impl<T: Scalar> Acquisition<T> {
    pub fn exact() -> Self {
        Self { shots: None, seed: 0, p_ms: T::one() }
    }

    pub fn sampled(shots: usize, seed: u64) -> Self {
        Self { shots: Some(shots), seed, p_ms: T::one() }
    }

    pub fn with_readout(self, p_ms: T) -> Self {
        Self { p_ms, ..self }
    }
}

/// Data for every setting; setting `k` uses RNG stream `k`.
pub fn acquire<T: Scalar, S: QuantumState<T> + Sync>(
    state: &S,
    settings: &[MeasurementSetting],
    acq: &Acquisition<T>,
) -> Result<Vec<(MeasurementSetting, SettingData<T>)>> {
    use rayon::prelude::*;
    let n = state.n_qubits();
    settings
        .par_iter()
        .enumerate()
        .map(|(k, setting)| {
            let probs = setting_distribution(state, setting)?;
            let data = match acq.shots {
                None => SettingData::Distribution(flip_distribution(&probs, n, acq.p_ms)?),
                Some(shots) => {
                    if shots == 0 {
                        return Err(Error::Numerical("at least one shot required".into()));
                    }
                    let mut rng = stream_rng(acq.seed, k as u64);
                    let mut outcomes = sample_distribution(&probs, shots, &mut rng)?;
                    flip_outcomes(&mut outcomes, n, acq.p_ms, &mut rng)?;
                    SettingData::Shots(outcomes)
                }
            };
            Ok((setting.clone(), data))
        })
        .collect()
}
