use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::estimator::{flip_outcomes, setting_distribution, stream_rng};
use crate::noise::{entangle, spin_flip_weights, NoiseParams};
use crate::pauli::MeasurementSetting;
use crate::qstate::PureState;
use crate::scalar::Scalar;

/// Shot-by-shot simulation of the noisy protocol without density matrices.
///
/// Each shot draws a prepared basis state, runs it through the entangling
/// circuit (outcome distributions are cached per basis state), replaces the
/// outcome by a uniform one when the entangling step or white noise strikes,
/// and finally applies readout flips.
pub struct TrajectorySampler<T> {
    n: usize,
    setting: MeasurementSetting,
    params: NoiseParams<T>,
    prep: WeightedIndex<f64>,
    cache: HashMap<usize, WeightedIndex<f64>>,
}

impl<T: Scalar> TrajectorySampler<T> {
    pub fn new(n: usize, setting: MeasurementSetting, params: NoiseParams<T>) -> Result<Self> {
        params.validate()?;
        if setting.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, got: setting.n_qubits() });
        }
        if n > 20 {
            return Err(Error::RegisterTooLarge(n));
        }
        let w: Vec<f64> = spin_flip_weights(n, params.p_sf)?.iter().map(|x| x.to_f64_lossy()).collect();
        let prep = WeightedIndex::new(&w).map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(Self { n, setting, params, prep, cache: HashMap::new() })
    }

    fn outcome_dist(&mut self, b: usize) -> Result<&WeightedIndex<f64>> {
        if !self.cache.contains_key(&b) {
            let psi = entangle(&PureState::<T>::basis(self.n, b)?)?;
            let p: Vec<f64> = setting_distribution(&psi, &self.setting)?.iter().map(|x| x.to_f64_lossy().max(0.0)).collect();
            let d = WeightedIndex::new(&p).map_err(|e| Error::Numerical(e.to_string()))?;
            self.cache.insert(b, d);
        }
        Ok(&self.cache[&b])
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, shots: usize, rng: &mut R) -> Result<Vec<u64>> {
        let keep = self.params.depolarizing_factor().to_f64_lossy();
        let mut out = Vec::with_capacity(shots);
        for _ in 0..shots {
            let b = self.prep.sample(rng);
            let o = if rng.gen_bool(keep.clamp(0.0, 1.0)) {
                self.outcome_dist(b)?.sample(rng) as u64
            } else {
                rng.gen_range(0..1u64 << self.n)
            };
            out.push(o);
        }
        flip_outcomes(&mut out, self.n, self.params.p_ms, rng)?;
        Ok(out)
    }

    /// Convenience: `shots` outcomes on stream `stream` of `seed`.
    pub fn sample_stream(&mut self, shots: usize, seed: u64, stream: u64) -> Result<Vec<u64>> {
        let mut rng = stream_rng(seed, stream);
        self.sample(shots, &mut rng)
    }
}
