//! Error models for preparation, entangling and readout, plus parameter sweeps.
//!
//! The noisy state is built in a fixed order: spin-flip preparation, the
//! entangling circuit, replacement by the maximally mixed state with
//! probability `1 - p_es`, white noise `p_white`, then readout flips.

mod sweep;
mod table;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::check_probability;
use crate::protocol::{apply_layer, check_even, layer1_pairs, layer2_pairs, neel_state, phase_gate};
use crate::qstate::{MixedState, PureState, QuantumState, TwoQubitGate, MAX_MIXED_QUBITS};
use crate::scalar::Scalar;

pub use crate::estimator::{flip_distribution, flip_outcomes};
pub use sweep::{
    certification_threshold, crossing, fig5_subsets, sweep, Figure, SweepObservable, SweepRow, SweepTable, SWEEP_STEP,
};
pub use table::ExpectationTable;
pub use trajectory::TrajectorySampler;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams<T> {
    /// Weight of the maximally mixed state mixed into the output.
    pub p_white: T,
    /// Probability that each prepared spin is correct.
    pub p_sf: T,
    /// Probability that each single-site readout is correct.
    pub p_ms: T,
    /// Probability that the entangling step works; otherwise the output is maximally mixed.
    pub p_es: T,
}

impl<T: Scalar> Default for NoiseParams<T> {
    fn default() -> Self {
        Self { p_white: T::zero(), p_sf: T::one(), p_ms: T::one(), p_es: T::one() }
    }
}

impl<T: Scalar> NoiseParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_probability("p_white", self.p_white)?;
        check_probability("p_sf", self.p_sf)?;
        check_probability("p_ms", self.p_ms)?;
        check_probability("p_es", self.p_es)
    }

    /// Copy with one named parameter replaced.
    pub fn with(&self, name: &str, value: T) -> Result<Self> {
        let mut p = *self;
        match name {
            "p_white" => p.p_white = value,
            "p_sf" => p.p_sf = value,
            "p_ms" => p.p_ms = value,
            "p_es" => p.p_es = value,
            other => return Err(Error::UnknownParameter(other.to_string())),
        }
        p.validate()?;
        Ok(p)
    }

    /// Factor multiplying a traceless observable after the entangling step,
    /// before readout.
    pub fn depolarizing_factor(&self) -> T {
        self.p_es * (T::one() - self.p_white)
    }

    /// Readout factor for a string of support `k`.
    pub fn readout_factor(&self, k: usize) -> T {
        measurement_flip(T::one(), k, self.p_ms)
    }
}

/// `p I / 2^n + (1 - p) |psi><psi|`.
pub fn white_noise<T: Scalar>(psi: &PureState<T>, p: T) -> Result<MixedState<T>> {
    check_probability("p_white", p)?;
    Ok(psi.to_mixed()?.depolarize_globally(p))
}

/// Per-basis-state weights of the spin-flip preparation around the Néel pattern.
pub fn spin_flip_weights<T: Scalar>(n: usize, p_sf: T) -> Result<Vec<T>> {
    check_even(n, 2)?;
    check_probability("p_sf", p_sf)?;
    let neel: usize = (0..n).filter(|s| s % 2 == 0).map(|s| 1usize << (n - 1 - s)).sum();
    let q = T::one() - p_sf;
    Ok((0..1usize << n)
        .map(|b| {
            let d = (b ^ neel).count_ones() as i32;
            p_sf.powi(n as i32 - d) * q.powi(d)
        })
        .collect())
}

/// Mixture of product states with every site independently flipped with
/// probability `1 - p_sf` relative to the Néel pattern.
pub fn spin_flip_preparation<T: Scalar>(n: usize, p_sf: T) -> Result<MixedState<T>> {
    if n > MAX_MIXED_QUBITS {
        return Err(Error::RegisterTooLarge(n));
    }
    MixedState::diagonal(n, &spin_flip_weights(n, p_sf)?)
}

/// Expectation of a weight-`k` string after independent readout flips.
pub fn measurement_flip<T: Scalar>(expectation: T, k: usize, p_ms: T) -> T {
    expectation * (T::of(2.0) * p_ms - T::one()).powi(k as i32)
}

/// `p_es rho + (1 - p_es) I / 2^n`.
pub fn entangling_depolarize<T: Scalar>(rho: &MixedState<T>, p_es: T) -> Result<MixedState<T>> {
    check_probability("p_es", p_es)?;
    Ok(rho.depolarize_globally(T::one() - p_es))
}

/// Apply the forward entangling circuit to any state.
pub fn entangle<T: Scalar, S: QuantumState<T>>(state: &S) -> Result<S> {
    let n = state.n_qubits();
    let g = TwoQubitGate::sqrt_swap_dag();
    let s = apply_layer(state, &g, &layer1_pairs(n))?;
    let s = apply_layer(&s, &phase_gate(), &layer1_pairs(n))?;
    apply_layer(&s, &g, &layer2_pairs(n))
}

/// Density matrix before readout under all noise sources except `p_ms`.
pub fn noisy_state<T: Scalar>(n: usize, params: &NoiseParams<T>) -> Result<MixedState<T>> {
    params.validate()?;
    let pre = if params.p_sf == T::one() {
        neel_state::<T>(n)?.to_mixed()?
    } else {
        spin_flip_preparation(n, params.p_sf)?
    };
    let ent = entangle(&pre)?;
    let out = entangling_depolarize(&ent, params.p_es)?;
    Ok(out.depolarize_globally(params.p_white))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::homogeneous_value;
    use crate::protocol::target_state;

    #[test]
    fn white_noise_endpoints() {
        let t = target_state::<f64>(4).unwrap();
        let pure = white_noise(&t, 0.0).unwrap();
        assert!((pure.fidelity(&t).unwrap() - 1.0).abs() < 1e-12);
        let mixed = white_noise(&t, 1.0).unwrap();
        let mm = MixedState::maximally_mixed(4).unwrap();
        assert!(mixed.matrix().max_abs_diff(mm.matrix()) < 1e-15);
        assert!(white_noise(&t, 1.5).is_err());
    }

    #[test]
    fn spin_flip_endpoints() {
        let exact = spin_flip_preparation::<f64>(4, 1.0).unwrap();
        assert_eq!(exact.matrix()[(0b1010, 0b1010)].re, 1.0);
        let flat = spin_flip_preparation::<f64>(4, 0.5).unwrap();
        let mm = MixedState::maximally_mixed(4).unwrap();
        assert!(flat.matrix().max_abs_diff(mm.matrix()) < 1e-15);
        flat.validate().unwrap();
    }

    #[test]
    fn entangling_failure_zeroes_correlations() {
        let rho = noisy_state::<f64>(6, &NoiseParams { p_es: 0.0, ..Default::default() }).unwrap();
        let v = homogeneous_value(&rho, &[0, 1]).unwrap();
        assert!(v.gamma.abs() < 1e-12);
    }

    #[test]
    fn noiseless_state_is_target() {
        let rho = noisy_state::<f64>(6, &NoiseParams::default()).unwrap();
        let t = target_state::<f64>(6).unwrap();
        assert!((rho.fidelity(&t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn channels_give_valid_states() {
        let p = NoiseParams { p_white: 0.1, p_sf: 0.9, p_ms: 1.0, p_es: 0.8 };
        noisy_state::<f64>(4, &p).unwrap().validate().unwrap();
    }

    #[test]
    fn unknown_parameter_is_typed() {
        let p = NoiseParams::<f64>::default();
        assert_eq!(p.with("p_xx", 0.5).unwrap_err(), Error::UnknownParameter("p_xx".into()));
    }
}
