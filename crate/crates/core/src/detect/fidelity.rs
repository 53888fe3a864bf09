use std::collections::BTreeMap;

use crate::detect::{ExpectationEntry, Method, Verdict, WitnessReport};
use crate::error::{Error, Result};
use crate::estimator::{acquire, Acquisition};
use crate::pauli::{conjugated_stabilizers, estimate_sum, group_into_lms, term_census, PauliString, PauliSum};
use crate::protocol::{check_even, target_state};
use crate::qstate::QuantumState;
use crate::scalar::Scalar;

/// Fidelity above which a state near the target is genuinely multipartite entangled.
pub const GME_FIDELITY: f64 = 0.625;

/// `5/8 - F(state, target)`; negative values certify GME.
pub fn gme_witness<T: Scalar, S: QuantumState<T>>(state: &S) -> Result<T> {
    let n = state.n_qubits();
    check_even(n, 4)?;
    let target = target_state::<T>(n)?;
    Ok(T::of(GME_FIDELITY) - state.fidelity_to(&target)?)
}

/// `sum(e) / 2 - (n/2 - 1)`, a lower bound on the target fidelity.
pub fn fidelity_lower_bound<T: Scalar>(expectations: &[T], n: usize) -> Result<T> {
    if expectations.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: expectations.len() });
    }
    check_even(n, 4)?;
    let lim = T::one() + T::value_tol();
    if let Some(e) = expectations.iter().find(|e| !(e.abs() <= lim)) {
        return Err(Error::ExpectationOutOfRange(e.to_f64_lossy()));
    }
    let half = T::of(0.5);
    Ok(half * expectations.iter().copied().sum::<T>() - (T::of_usize(n) * half - T::one()))
}

/// White-noise weight at which the stabilizer bound reaches the GME fidelity.
pub fn white_noise_threshold(n: usize) -> f64 {
    3.0 / (4.0 * n as f64)
}

/// GME if the bound clears 5/8 by more than `3 stderr` (and the value tolerance),
/// Boundary if it sits within that band.
pub fn fidelity_verdict(bound: f64, stderr: f64) -> Verdict {
    let band = (3.0 * stderr).max(f64::VALUE_TOL);
    if bound - GME_FIDELITY > band {
        Verdict::Gme
    } else if (bound - GME_FIDELITY).abs() <= band {
        Verdict::Boundary
    } else {
        Verdict::Inconclusive
    }
}

/// Exact expectations of the target's stabilizers.
pub fn stabilizer_expectations<T: Scalar, S: QuantumState<T>>(state: &S) -> Result<Vec<T>> {
    conjugated_stabilizers::<T>(state.n_qubits())?.iter().map(|s| state.expectation_sum(s)).collect()
}

/// Full fidelity-witness pipeline: group stabilizer terms into settings,
/// acquire data and evaluate the lower bound with its standard error.
pub fn fidelity_witness<T: Scalar, S: QuantumState<T> + Sync>(state: &S, acq: &Acquisition<T>) -> Result<WitnessReport> {
    let n = state.n_qubits();
    let stabs = conjugated_stabilizers::<T>(n)?;
    let settings = group_into_lms(&stabs, n)?;
    let data = acquire(state, &settings, acq)?;

    let mut expectations = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for (k, s) in stabs.iter().enumerate() {
        let (v, e) = estimate_sum(&data, s)?;
        values.push(v);
        expectations.push(ExpectationEntry::new(format!("S{k}"), v.to_f64_lossy(), e.to_f64_lossy()));
    }
    // the bound as one observable so shared settings contribute their covariance
    let mut terms: Vec<PauliString<T>> = stabs
        .iter()
        .flat_map(|s| s.terms().iter().map(|t| t.with_weight(t.weight() * T::of(0.5))))
        .collect();
    terms.push(PauliString::identity(n)?.with_weight(-(T::of_usize(n / 2) - T::one())));
    let bound_op = PauliSum::new(n, terms)?;
    let (bound, bound_err) = estimate_sum(&data, &bound_op)?;
    // the direct formula doubles as a consistency check
    let clipped: Vec<T> = values.iter().map(|v| v.max(-T::one()).min(T::one())).collect();
    let bound_direct = fidelity_lower_bound(&clipped, n).unwrap_or(bound);

    let census = term_census(&stabs);
    let (b, be) = (bound.to_f64_lossy(), bound_err.to_f64_lossy());
    let mut derived = BTreeMap::new();
    derived.insert("fidelity_bound".to_string(), b);
    derived.insert("fidelity_bound_stderr".to_string(), be);
    derived.insert("fidelity_bound_clipped".to_string(), bound_direct.to_f64_lossy());
    derived.insert("witness_upper".to_string(), GME_FIDELITY - b);
    derived.insert("settings".to_string(), settings.len() as f64);
    derived.insert("terms_raw".to_string(), census.raw as f64);
    derived.insert("terms_distinct".to_string(), census.distinct as f64);
    derived.insert("white_noise_threshold".to_string(), white_noise_threshold(n));
    derived.insert("p_ms".to_string(), acq.p_ms.to_f64_lossy());

    let trace = settings
        .iter()
        .map(|s| serde_json::json!({ "setting": s.letter_string(), "resolves": s.resolved_terms().len() }))
        .collect();
    Ok(WitnessReport {
        method: Method::Fidelity,
        n,
        expectations,
        derived,
        verdict: fidelity_verdict(b, be),
        trace,
        seed: acq.shots.map(|_| acq.seed),
        shots: acq.shots,
    })
}
