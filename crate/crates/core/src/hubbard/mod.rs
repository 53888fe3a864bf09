//! Two-species Bose-Hubbard model on double-well superlattices.
//!
//! Sites are grouped in double wells `(0, 1), (2, 3), ...`; even sites are the
//! left subsite. Bonds inside a well tunnel with `j_inner`, bonds between
//! wells with `j_inter`. Units have hbar = 1.

mod gate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, HermitianEigen};
use crate::scalar::{creal, czero, Scalar, C};

pub use gate::{
    chain_leakage, exchange_period, extract_gate, fast_gate_interaction, fast_gate_time, gate_sweep, heisenberg_propagator,
    phase_aligned_distance, phase_step_time, register_states, superexchange, tilt_phase_gate, ChainReport, EffectiveGate,
    GateSweepRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Qubit value: up is `|1>`.
    pub fn from_bit(bit: usize) -> Self {
        if bit == 1 {
            Self::Up
        } else {
            Self::Down
        }
    }

    fn offset(self) -> usize {
        match self {
            Self::Up => 0,
            Self::Down => 1,
        }
    }
}

/// Occupation-number basis with a fixed total atom number.
///
/// Modes are ordered `(site, spin)` with up first; states are listed in
/// ascending lexicographic order of their occupation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    sites: usize,
    atoms: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl FockBasis {
    pub const DIM_CAP: usize = 5000;

    pub fn new(sites: usize, atoms: usize) -> Result<Self> {
        if sites == 0 || sites % 2 == 1 {
            return Err(Error::InconsistentBasis(format!("{sites} sites do not form double wells")));
        }
        let modes = 2 * sites;
        let dim = binomial(atoms + modes - 1, atoms);
        if dim > Self::DIM_CAP {
            return Err(Error::BasisTooLarge { dim, cap: Self::DIM_CAP });
        }
        let mut states = Vec::with_capacity(dim);
        let mut occ = vec![0u8; modes];
        compositions(&mut occ, 0, atoms, &mut states);
        let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        Ok(Self { sites, atoms, states, index })
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.sites
    }

    #[inline]
    pub fn atoms(&self) -> usize {
        self.atoms
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn mode(site: usize, spin: Spin) -> usize {
        2 * site + spin.offset()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Index of the singly occupied state with the given spin per site.
    pub fn product_state(&self, spins: &[Spin]) -> Result<usize> {
        if spins.len() != self.sites || self.atoms != self.sites {
            return Err(Error::InconsistentBasis(format!(
                "{} spins for {} sites holding {} atoms",
                spins.len(),
                self.sites,
                self.atoms
            )));
        }
        let mut occ = vec![0u8; 2 * self.sites];
        for (s, &spin) in spins.iter().enumerate() {
            occ[Self::mode(s, spin)] = 1;
        }
        Ok(self.index[&occ])
    }

    /// `(n_up, n_down)` of state `k`; both are conserved by the Hamiltonian.
    pub fn spin_counts(&self, k: usize) -> (usize, usize) {
        self.states[k].chunks(2).fold((0, 0), |(u, d), m| (u + m[0] as usize, d + m[1] as usize))
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn compositions(occ: &mut Vec<u8>, mode: usize, left: usize, out: &mut Vec<Vec<u8>>) {
    if mode + 1 == occ.len() {
        occ[mode] = left as u8;
        out.push(occ.clone());
        return;
    }
    for k in 0..=left {
        occ[mode] = k as u8;
        compositions(occ, mode + 1, left - k, out);
    }
    occ[mode] = 0;
}

/// How the cross-species on-site term is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    /// `V n_up n_down`, equal to the same-species pair energy, which makes the
    /// low-energy exchange isotropic.
    #[default]
    Isotropic,
    /// `V (n_up n_down + n_down n_up)`, i.e. twice the same-species pair energy.
    Doubled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams<T> {
    pub j_inner: T,
    pub j_inter: T,
    pub v: T,
    /// Spin-dependent tilt between the subsites of every well.
    pub delta: T,
    #[serde(default)]
    pub interaction: Interaction,
}

impl<T: Scalar> HubbardParams<T> {
    pub fn double_well(j: T, v: T) -> Self {
        Self { j_inner: j, j_inter: T::zero(), v, delta: T::zero(), interaction: Interaction::Isotropic }
    }

    pub fn with_delta(self, delta: T) -> Self {
        Self { delta, ..self }
    }

    pub fn with_j_inter(self, j_inter: T) -> Self {
        Self { j_inter, ..self }
    }

    pub fn with_interaction(self, interaction: Interaction) -> Self {
        Self { interaction, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("j_inner", self.j_inner), ("j_inter", self.j_inter), ("v", self.v), ("delta", self.delta)] {
            if !x.is_finite() {
                return Err(Error::Numerical(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    fn cross_weight(&self) -> T {
        match self.interaction {
            Interaction::Isotropic => self.v,
            Interaction::Doubled => self.v + self.v,
        }
    }
}

pub fn build_hamiltonian<T: Scalar>(params: &HubbardParams<T>, basis: &FockBasis) -> Result<CMatrix<T>> {
    params.validate()?;
    let dim = basis.dim();
    let half = T::of(0.5);
    let mut h = CMatrix::zeros(dim, dim);
    for (k, occ) in basis.states().iter().enumerate() {
        let mut diag = T::zero();
        for s in 0..basis.sites() {
            let up = T::of(occ[FockBasis::mode(s, Spin::Up)] as f64);
            let down = T::of(occ[FockBasis::mode(s, Spin::Down)] as f64);
            diag += half * params.v * (up * (up - T::one()) + down * (down - T::one()));
            diag += params.cross_weight() * up * down;
            let side = if s % 2 == 0 { T::one() } else { -T::one() };
            diag += half * params.delta * side * (up - down);
        }
        h[(k, k)] = creal(diag);
        for a in 0..basis.sites() - 1 {
            let j = if a % 2 == 0 { params.j_inner } else { params.j_inter };
            if j == T::zero() {
                continue;
            }
            for spin in [Spin::Up, Spin::Down] {
                let (ma, mb) = (FockBasis::mode(a, spin), FockBasis::mode(a + 1, spin));
                for (from, to) in [(ma, mb), (mb, ma)] {
                    if occ[from] == 0 {
                        continue;
                    }
                    let amp = T::of(occ[from] as f64 * (occ[to] as f64 + 1.0)).sqrt();
                    let mut next = occ.clone();
                    next[from] -= 1;
                    next[to] += 1;
                    let r = basis.index_of(&next).ok_or_else(|| Error::InconsistentBasis("hop leaves the basis".into()))?;
                    h[(r, k)] += creal(-j * amp);
                }
            }
        }
    }
    Ok(h)
}

/// One conserved `(n_up, n_down)` block and its spectrum.
#[derive(Debug, Clone)]
pub struct Sector<T> {
    pub n_up: usize,
    pub n_down: usize,
    pub indices: Vec<usize>,
    pub eigen: HermitianEigen<T>,
}

/// `exp(-i H t)` assembled from per-sector eigendecompositions.
#[derive(Debug, Clone)]
pub struct SpectralPropagator<T> {
    dim: usize,
    sectors: Vec<Sector<T>>,
}

impl<T: Scalar> SpectralPropagator<T> {
    /// Fails if `h` couples different `(n_up, n_down)` sectors.
    pub fn new(h: &CMatrix<T>, basis: &FockBasis) -> Result<Self> {
        let dim = basis.dim();
        if h.rows() != dim || !h.is_square() {
            return Err(Error::DimensionMismatch { expected: dim, got: h.rows() });
        }
        let counts: Vec<(usize, usize)> = (0..dim).map(|k| basis.spin_counts(k)).collect();
        let tol = T::of(1e-12);
        for r in 0..dim {
            for c in 0..dim {
                if counts[r] != counts[c] && h[(r, c)].norm() > tol {
                    return Err(Error::Numerical(format!("Hamiltonian couples sectors {:?} and {:?}", counts[r], counts[c])));
                }
            }
        }
        let mut keys: Vec<(usize, usize)> = counts.clone();
        keys.sort();
        keys.dedup();
        let sectors = keys
            .into_iter()
            .map(|(n_up, n_down)| {
                let indices: Vec<usize> = (0..dim).filter(|&k| counts[k] == (n_up, n_down)).collect();
                let block = CMatrix::from_fn(indices.len(), indices.len(), |r, c| h[(indices[r], indices[c])]);
                Sector { n_up, n_down, eigen: eigh(&block), indices }
            })
            .collect();
        Ok(Self { dim, sectors })
    }

    pub fn from_params(params: &HubbardParams<T>, basis: &FockBasis) -> Result<Self> {
        Self::new(&build_hamiltonian(params, basis)?, basis)
    }

    pub fn sectors(&self) -> &[Sector<T>] {
        &self.sectors
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<T> {
        let mut e: Vec<T> = self.sectors.iter().flat_map(|s| s.eigen.values.iter().copied()).collect();
        e.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));
        e
    }

    pub fn unitary(&self, t: T) -> Result<CMatrix<T>> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.to_f64_lossy()));
        }
        let mut u = CMatrix::zeros(self.dim, self.dim);
        for s in &self.sectors {
            let block = s.eigen.propagator(t);
            for (r, &gr) in s.indices.iter().enumerate() {
                for (c, &gc) in s.indices.iter().enumerate() {
                    u[(gr, gc)] = block[(r, c)];
                }
            }
        }
        Ok(u)
    }

    pub fn evolve(&self, state: &[C<T>], t: T) -> Result<Vec<C<T>>> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: state.len() });
        }
        Ok(self.unitary(t)?.mul_vec(state))
    }
}

/// Evolve basis state `initial` for time `t`.
pub fn evolve<T: Scalar>(params: &HubbardParams<T>, basis: &FockBasis, initial: usize, t: T) -> Result<Vec<C<T>>> {
    let mut psi = vec![czero(); basis.dim()];
    *psi.get_mut(initial).ok_or(Error::DimensionMismatch { expected: basis.dim(), got: initial })? = creal(T::one());
    SpectralPropagator::from_params(params, basis)?.evolve(&psi, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::random::random_pure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_dimensions() {
        assert_eq!(FockBasis::new(2, 2).unwrap().dim(), 10);
        assert_eq!(FockBasis::new(4, 4).unwrap().dim(), 330);
        assert!(matches!(FockBasis::new(3, 3), Err(Error::InconsistentBasis(_))));
        assert!(matches!(FockBasis::new(8, 8), Err(Error::BasisTooLarge { .. })));
    }

    #[test]
    fn basis_is_lexicographic() {
        let b = FockBasis::new(2, 2).unwrap();
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        assert!(b.states().iter().all(|s| s.iter().map(|&x| x as usize).sum::<usize>() == 2));
    }

    #[test]
    fn interaction_only_spectrum() {
        let b = FockBasis::new(2, 2).unwrap();
        let h = build_hamiltonian(&HubbardParams::double_well(0.0, 3.0), &b).unwrap();
        for (k, occ) in b.states().iter().enumerate() {
            let single = occ.chunks(2).all(|m| m[0] + m[1] <= 1);
            let expect: f64 = if single { 0.0 } else { 3.0 };
            assert!((h[(k, k)].re - expect).abs() < 1e-14, "{occ:?}");
            for r in 0..b.dim() {
                if r != k {
                    assert_eq!(h[(r, k)], czero());
                }
            }
        }
    }

    #[test]
    fn random_hamiltonians_are_hermitian_and_conserve_spin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = FockBasis::new(4, 4).unwrap();
        for _ in 0..3 {
            let p = HubbardParams {
                j_inner: rng.gen_range(0.1..2.0),
                j_inter: rng.gen_range(0.0..1.0),
                v: rng.gen_range(0.5..50.0),
                delta: rng.gen_range(-1.0..1.0),
                interaction: Interaction::Isotropic,
            };
            let h = build_hamiltonian::<f64>(&p, &b).unwrap();
            assert!(h.is_hermitian(1e-14));
            let prop = SpectralPropagator::new(&h, &b).unwrap();
            assert_eq!(prop.sectors().len(), 5);
            assert!(prop.unitary(0.7).unwrap().is_unitary(1e-12));
        }
    }

    #[test]
    fn superexchange_gap_matches_formula() {
        let (j, v) = (1.0, 100.0);
        let b = FockBasis::new(2, 2).unwrap();
        let prop = SpectralPropagator::from_params(&HubbardParams::<f64>::double_well(j, v), &b).unwrap();
        let sector = prop.sectors().iter().find(|s| s.n_up == 1 && s.n_down == 1).unwrap();
        // Lowest two levels of the mixed sector are the triplet and singlet.
        let gap = sector.eigen.values[1] - sector.eigen.values[0];
        let j_ex = superexchange(j, v);
        assert!((gap / (2.0 * j_ex) - 1.0).abs() < 10.0 * (j / v).powi(2), "{gap}");
    }

    #[test]
    fn evolution_preserves_norm_and_identity_at_zero() {
        let b = FockBasis::new(2, 2).unwrap();
        let p = HubbardParams::<f64>::double_well(1.0, 7.0).with_delta(0.3);
        let prop = SpectralPropagator::from_params(&p, &b).unwrap();
        assert!(prop.unitary(0.0).unwrap().max_abs_diff(&CMatrix::identity(10)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi: Vec<C<f64>> = random_pure::<f64, _>(4, &mut rng).amplitudes()[..10].to_vec();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let out = prop.evolve(&psi, 2.5).unwrap();
        assert!((out.iter().map(|a| a.norm_sqr()).sum::<f64>() - norm).abs() < 1e-12);
        assert!(matches!(prop.unitary(-1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn polarized_pair_is_stationary() {
        let b = FockBasis::new(2, 2).unwrap();
        let p = HubbardParams::<f64>::double_well(1.0, 100.0);
        let k = b.product_state(&[Spin::Up, Spin::Up]).unwrap();
        let psi = evolve(&p, &b, k, 37.0).unwrap();
        assert!(psi[k].norm() > 0.999);
    }

    #[test]
    fn exchange_returns_after_one_period() {
        let (j, v) = (1.0, 100.0);
        let b = FockBasis::new(2, 2).unwrap();
        let k = b.product_state(&[Spin::Down, Spin::Up]).unwrap();
        let psi = evolve(&HubbardParams::<f64>::double_well(j, v), &b, k, exchange_period(j, v)).unwrap();
        // Amplitude, not modulus: the global phase comes back too.
        assert!(psi[k].re > 0.999, "{}", psi[k]);
    }
}
