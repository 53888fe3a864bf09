use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hubbard::{FockBasis, HubbardParams, SpectralPropagator, Spin};
use crate::linalg::CMatrix;
use crate::qstate::TwoQubitGate;
use crate::scalar::{cis, czero, Scalar};

/// Second-order exchange coupling `2 J^2 / V`.
pub fn superexchange<T: Scalar>(j: T, v: T) -> T {
    T::of(2.0) * j * j / v
}

/// `2 pi / J_ex`: a full exchange cycle.
pub fn exchange_period<T: Scalar>(j: T, v: T) -> T {
    T::of(2.0) * T::PI() / superexchange(j, v)
}

/// Interaction at which the doubly occupied admixture returns exactly after `pi / V`.
pub fn fast_gate_interaction<T: Scalar>(j: T) -> T {
    T::of(4.0) * j / T::of(3.0).sqrt()
}

pub fn fast_gate_time<T: Scalar>(v: T) -> T {
    T::PI() / v
}

/// Shortest time for which the tilt gives `|10>` a phase `+pi/2` relative to `|01>`.
///
/// The two states differ in energy by `2 delta`.
pub fn phase_step_time<T: Scalar>(delta: T) -> Result<T> {
    if delta == T::zero() {
        return Err(Error::Numerical("zero tilt produces no relative phase".into()));
    }
    let quarter = T::FRAC_PI_4();
    Ok(if delta > T::zero() { T::of(3.0) * quarter / delta } else { quarter / -delta })
}

/// Fock indices of the `2^sites` singly occupied spin configurations.
///
/// Register code `sum_s b_s 2^s`, which for two sites is the gate-local index
/// `b_i + 2 b_j`.
pub fn register_states(basis: &FockBasis) -> Result<Vec<usize>> {
    let sites = basis.sites();
    (0..1usize << sites)
        .map(|code| {
            let spins: Vec<Spin> = (0..sites).map(|s| Spin::from_bit((code >> s) & 1)).collect();
            basis.product_state(&spins)
        })
        .collect()
}

/// Propagator restricted to the singly occupied register subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGate<T> {
    matrix: CMatrix<T>,
    /// Average population that leaves the subspace.
    leakage: T,
}

impl<T: Scalar> EffectiveGate<T> {
    fn project(u: &CMatrix<T>, register: &[usize]) -> Self {
        let d = register.len();
        let matrix = CMatrix::from_fn(d, d, |r, c| u[(register[r], register[c])]);
        let kept: T = matrix.as_slice().iter().map(|a| a.norm_sqr()).sum();
        let leakage = (T::one() - kept / T::of_usize(d)).max(T::zero());
        Self { matrix, leakage }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn leakage(&self) -> T {
        self.leakage
    }

    /// `|Tr(ideal† M)| / d`, blind to the global phase of either side.
    pub fn fidelity(&self, ideal: &CMatrix<T>) -> T {
        trace_overlap(ideal, &self.matrix) / T::of_usize(self.matrix.rows())
    }

    /// Same metric restricted to the basis states in `subspace`.
    pub fn fidelity_on(&self, ideal: &CMatrix<T>, subspace: &[usize]) -> T {
        let mut acc = czero::<T>();
        for &r in subspace {
            for &c in subspace {
                acc += ideal[(r, c)].conj() * self.matrix[(r, c)];
            }
        }
        acc.norm() / T::of_usize(subspace.len())
    }
}

fn trace_overlap<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * *y).fold(czero::<T>(), |s, z| s + z).norm()
}

/// `min_phi ||a - e^{i phi} b||_F`.
pub fn phase_aligned_distance<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let sq = a.frobenius_norm().powi(2) + b.frobenius_norm().powi(2) - T::of(2.0) * trace_overlap(a, b);
    sq.max(T::zero()).sqrt()
}

/// Exact propagator of `-(J_ex / 2)(XX + YY + ZZ)` in gate-local order.
///
/// Triplet states sit at `-J_ex / 2`, the singlet at `3 J_ex / 2`.
pub fn heisenberg_propagator<T: Scalar>(j_ex: T, t: T) -> CMatrix<T> {
    let half = T::of(0.5);
    let trip = cis(j_ex * t * half);
    let sing = cis(-T::of(1.5) * j_ex * t);
    let indicator = |b: bool| if b { T::one() } else { T::zero() };
    CMatrix::from_fn(4, 4, |r, c| {
        let id = indicator(r == c);
        let pr = indicator(matches!((r, c), (0, 0) | (1, 2) | (2, 1) | (3, 3)));
        trip * (half * (id + pr)) + sing * (half * (id - pr))
    })
}

/// Two-site, two-atom propagator at time `t` projected onto the qubit subspace.
pub fn extract_gate<T: Scalar>(params: &HubbardParams<T>, t: T) -> Result<EffectiveGate<T>> {
    let basis = FockBasis::new(2, 2)?;
    let u = SpectralPropagator::from_params(&HubbardParams { j_inter: T::zero(), ..*params }, &basis)?.unitary(t)?;
    Ok(EffectiveGate::project(&u, &register_states(&basis)?))
}

/// Tilt-only step: hopping is switched off (deep barrier) and the exact
/// diagonal evolution under the spin-dependent tilt is returned.
pub fn tilt_phase_gate<T: Scalar>(params: &HubbardParams<T>, t: T) -> Result<EffectiveGate<T>> {
    let frozen = HubbardParams { j_inner: T::zero(), j_inter: T::zero(), ..*params };
    let basis = FockBasis::new(2, 2)?;
    let u = SpectralPropagator::from_params(&frozen, &basis)?.unitary(t)?;
    Ok(EffectiveGate::project(&u, &register_states(&basis)?))
}

/// Two double wells run for one gate time with inter-well tunneling on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub j_inter: f64,
    pub gate_time: f64,
    /// `1 - F` against the ideal gate on both wells.
    pub infidelity: f64,
    /// The same quantity with `j_inter = 0`.
    pub isolated_infidelity: f64,
    /// `infidelity - isolated_infidelity`: the part caused by inter-well
    /// tunneling, leakage included.
    pub tunneling_infidelity: f64,
    pub leakage: f64,
}

/// Four sites, four atoms, evolved for `gate_time`; the ideal reference is
/// `sqrt(SWAP)†` on each double well.
pub fn chain_leakage<T: Scalar>(params: &HubbardParams<T>, gate_time: T) -> Result<ChainReport> {
    let basis = FockBasis::new(4, 4)?;
    let register = register_states(&basis)?;
    let coupled = EffectiveGate::project(&SpectralPropagator::from_params(params, &basis)?.unitary(gate_time)?, &register);
    let isolated_params = HubbardParams { j_inter: T::zero(), ..*params };
    let isolated =
        EffectiveGate::project(&SpectralPropagator::from_params(&isolated_params, &basis)?.unitary(gate_time)?, &register);
    let g = TwoQubitGate::<T>::sqrt_swap_dag().to_cmatrix();
    let ideal = g.kron(&g);
    let infidelity = (T::one() - coupled.fidelity(&ideal)).to_f64_lossy();
    let isolated_infidelity = (T::one() - isolated.fidelity(&ideal)).to_f64_lossy();
    Ok(ChainReport {
        j_inter: params.j_inter.to_f64_lossy(),
        gate_time: gate_time.to_f64_lossy(),
        infidelity,
        isolated_infidelity,
        tunneling_infidelity: infidelity - isolated_infidelity,
        leakage: coupled.leakage().to_f64_lossy(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSweepRow {
    pub v_over_j: f64,
    pub t: f64,
    /// Against `sqrt(SWAP)†`.
    pub gate_fidelity: f64,
    pub leakage: f64,
}

/// Evaluate `extract_gate` at each `(V/J, t)` with `J = j`.
pub fn gate_sweep<T: Scalar>(j: T, points: &[(T, T)]) -> Result<Vec<GateSweepRow>> {
    let ideal = TwoQubitGate::<T>::sqrt_swap_dag().to_cmatrix();
    points
        .par_iter()
        .map(|&(ratio, t)| {
            let g = extract_gate(&HubbardParams::double_well(j, ratio * j), t)?;
            Ok(GateSweepRow {
                v_over_j: ratio.to_f64_lossy(),
                t: t.to_f64_lossy(),
                gate_fidelity: g.fidelity(&ideal).to_f64_lossy(),
                leakage: g.leakage().to_f64_lossy(),
            })
        })
        .collect()
}
