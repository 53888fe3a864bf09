use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{entangle, spin_flip_weights, NoiseParams};
use crate::pauli::PauliString;
use crate::protocol::check_even;
use crate::qstate::{PureState, QuantumState};
use crate::scalar::Scalar;

/// Expectations of fixed observables on the entangled image of every
/// computational basis state.
///
/// The spin-flip preparation is diagonal, so any noisy expectation is a
/// weighted sum of these rows; the later noise sources only rescale
/// traceless observables. This makes a whole sweep one dot product per point.
#[derive(Debug, Clone)]
pub struct ExpectationTable<T> {
    n: usize,
    observables: Vec<PauliString<T>>,
    /// `rows[o][b] = <b| U† O U |b>`
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> ExpectationTable<T> {
    pub fn build(n: usize, observables: Vec<PauliString<T>>) -> Result<Self> {
        check_even(n, 2)?;
        if let Some(o) = observables.iter().find(|o| o.n_qubits() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: o.n_qubits() });
        }
        let per_basis: Vec<Vec<T>> = (0..1usize << n)
            .into_par_iter()
            .map(|b| -> Result<Vec<T>> {
                let psi = entangle(&PureState::<T>::basis(n, b)?)?;
                observables.iter().map(|o| psi.expectation(o)).collect()
            })
            .collect::<Result<_>>()?;
        let rows = (0..observables.len()).map(|o| per_basis.iter().map(|r| r[o]).collect()).collect();
        Ok(Self { n, observables, rows })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn observables(&self) -> &[PauliString<T>] {
        &self.observables
    }

    /// Noisy expectation of observable `index` under `params`.
    pub fn expectation(&self, index: usize, weights: &[T], params: &NoiseParams<T>) -> T {
        let o = &self.observables[index];
        let clean: T = self.rows[index].iter().zip(weights).map(|(e, w)| *e * *w).sum();
        let scale = params.readout_factor(o.support_size());
        if o.is_identity() {
            clean
        } else {
            clean * params.depolarizing_factor() * scale
        }
    }

    /// All observables at once.
    pub fn expectations(&self, params: &NoiseParams<T>) -> Result<Vec<T>> {
        params.validate()?;
        let w = spin_flip_weights(self.n, params.p_sf)?;
        Ok((0..self.observables.len()).map(|k| self.expectation(k, &w, params)).collect())
    }
}
