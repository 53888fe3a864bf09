//! Generation of the target state by two layers of superexchange gates, and the
//! reverse sequence that maps it back to Bell pairs and the Néel state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{PureState, QuantumState, TwoQubitGate};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepLabel {
    Neel,
    Layer1Sqswapdag,
    Phase,
    Layer2Sqswapdag,
    RevLayer2,
    RevPhase,
    RevLayer1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolStep {
    pub label: StepLabel,
    pub placements: Vec<(usize, usize)>,
}

/// Full forward and reverse schedule for an `n`-site chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protocol {
    pub n: usize,
    pub steps: Vec<ProtocolStep>,
}

impl Protocol {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n, 2)?;
        let (l1, l2) = (layer1_pairs(n), layer2_pairs(n));
        let step = |label, placements: &Vec<(usize, usize)>| ProtocolStep { label, placements: placements.clone() };
        Ok(Self {
            n,
            steps: vec![
                step(StepLabel::Neel, &Vec::new()),
                step(StepLabel::Layer1Sqswapdag, &l1),
                step(StepLabel::Phase, &l1),
                step(StepLabel::Layer2Sqswapdag, &l2),
                step(StepLabel::RevLayer2, &l2),
                step(StepLabel::RevPhase, &l1),
                step(StepLabel::RevLayer1, &l1),
            ],
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("protocol serializes")
    }
}

pub(crate) fn check_even(n: usize, min: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddQubitCount(n));
    }
    if n < min {
        return Err(Error::TooFewQubits { n, min });
    }
    Ok(())
}

/// `(2k, 2k+1)` for every `k`.
pub fn layer1_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect()
}

/// `(2k+1, 2k+2)`; empty for `n = 2`.
pub fn layer2_pairs(n: usize) -> Vec<(usize, usize)> {
    crate::pauli::second_layer_pairs(n)
}

/// `|1010...10>`.
pub fn neel_state<T: Scalar>(n: usize) -> Result<PureState<T>> {
    check_even(n, 2)?;
    let bits: Vec<u8> = (0..n).map(|s| u8::from(s % 2 == 0)).collect();
    PureState::from_bits(&bits)
}

pub fn phase_gate<T: Scalar>() -> TwoQubitGate<T> {
    TwoQubitGate::phase()
}

pub fn apply_layer<T: Scalar, S: QuantumState<T>>(
    state: &S,
    gate: &TwoQubitGate<T>,
    pairs: &[(usize, usize)],
) -> Result<S> {
    let mut out = state.clone();
    for &(i, j) in pairs {
        out.apply_gate_mut(gate, i, j)?;
    }
    Ok(out)
}

/// The target and every intermediate of the forward protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTarget<T> {
    pub neel: PureState<T>,
    /// After the first gate layer.
    pub layer1: PureState<T>,
    /// Product of Bell pairs.
    pub bell: PureState<T>,
    pub target: PureState<T>,
}

pub fn prepare_target<T: Scalar>(n: usize) -> Result<PreparedTarget<T>> {
    let neel = neel_state(n)?;
    let gate = TwoQubitGate::sqrt_swap_dag();
    let layer1 = apply_layer(&neel, &gate, &layer1_pairs(n))?;
    let bell = apply_layer(&layer1, &phase_gate(), &layer1_pairs(n))?;
    let target = apply_layer(&bell, &gate, &layer2_pairs(n))?;
    Ok(PreparedTarget { neel, layer1, bell, target })
}

/// Only the final state of [`prepare_target`].
pub fn target_state<T: Scalar>(n: usize) -> Result<PureState<T>> {
    Ok(prepare_target(n)?.target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqrtSwapRealization {
    #[default]
    Direct,
    /// Three consecutive adjoint pulses.
    CubeOfDagger,
}

impl SqrtSwapRealization {
    pub fn gate<T: Scalar>(self) -> TwoQubitGate<T> {
        match self {
            Self::Direct => TwoQubitGate::sqrt_swap(),
            Self::CubeOfDagger => TwoQubitGate::sqrt_swap_via_cube(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReverseStates<S> {
    /// After undoing the second layer: Bell pairs for a perfect run.
    pub bell: S,
    /// After undoing the phase.
    pub layer1: S,
    /// After undoing the first layer: the Néel state for a perfect run.
    pub neel: S,
}

pub fn reverse_sequence<T: Scalar, S: QuantumState<T>>(
    state: &S,
    realization: SqrtSwapRealization,
) -> Result<ReverseStates<S>> {
    let n = state.n_qubits();
    check_even(n, 2)?;
    let sq = realization.gate::<T>();
    let bell = apply_layer(state, &sq, &layer2_pairs(n))?;
    let layer1 = apply_layer(&bell, &TwoQubitGate::phase_dag(), &layer1_pairs(n))?;
    let neel = apply_layer(&layer1, &sq, &layer1_pairs(n))?;
    Ok(ReverseStates { bell, layer1, neel })
}

/// True iff every non-negligible amplitude sits on a basis state with exactly
/// `n/2` ones.
pub fn support_check<T: Scalar>(state: &PureState<T>) -> bool {
    let n = state.n_qubits();
    n % 2 == 0
        && state
            .amplitudes()
            .iter()
            .enumerate()
            .all(|(b, a)| a.norm() <= T::of(1e-10) || b.count_ones() as usize == n / 2)
}

/// True iff every basis state carries the same modulus as its bitwise complement.
pub fn paired_moduli<T: Scalar>(state: &PureState<T>) -> bool {
    let full = state.dim() - 1;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .all(|(b, a)| (state.amplitude(full ^ b).norm() - a.norm()).abs() <= T::of(1e-10))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportReport {
    pub spin_zero: bool,
    pub paired_moduli: bool,
}

pub fn support_report<T: Scalar>(state: &PureState<T>) -> SupportReport {
    SupportReport { spin_zero: support_check(state), paired_moduli: paired_moduli(state) }
}
