//! Exact N-qubit pure states and density matrices.
//!
//! Site `0` is the most significant bit of a basis index; bit value `1` is the
//! up spin `|1>`. Site indices are zero-based throughout the crate.

mod gate;
pub mod random;

pub use gate::{GateLabel, TwoQubitGate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, CMatrix};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{cone, creal, czero, Scalar, C};

/// Largest register handled by the dense pure-state path.
pub const MAX_PURE_QUBITS: usize = 24;
/// Largest register handled by the dense density-matrix path.
pub const MAX_MIXED_QUBITS: usize = 12;

#[inline]
pub(crate) fn site_bit(n: usize, site: usize) -> usize {
    1usize << (n - 1 - site)
}

pub(crate) fn check_sites(n: usize, i: usize, j: usize) -> Result<()> {
    for s in [i, j] {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
    }
    if i == j {
        return Err(Error::EqualSites(i));
    }
    Ok(())
}

fn normalize_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x >= n) {
        return Err(Error::SiteOutOfRange { site: bad, n });
    }
    Ok(s)
}

/// Gather the bits of `index` at `sites` (first listed site becomes the MSB).
#[inline]
fn gather_bits(index: usize, n: usize, sites: &[usize]) -> usize {
    sites.iter().fold(0usize, |acc, &s| (acc << 1) | ((index >> (n - 1 - s)) & 1))
}

/// Common gate interface for pure and mixed registers.
pub trait QuantumState<T: Scalar>: Clone {
    fn n_qubits(&self) -> usize;
    fn apply_gate_mut(&mut self, gate: &TwoQubitGate<T>, i: usize, j: usize) -> Result<()>;
    fn expectation(&self, obs: &PauliString<T>) -> Result<T>;
    /// Apply a single-site unitary `u` (basis `|0>, |1>`).
    fn apply_local_mut(&mut self, u: &[[C<T>; 2]; 2], site: usize) -> Result<()>;
    /// Computational-basis outcome distribution.
    fn basis_probabilities(&self) -> Vec<T>;
    /// `<psi| state |psi>`.
    fn fidelity_to(&self, psi: &PureState<T>) -> Result<T>;
    /// Conjugate by the diagonal unitary with entries `phase(b)`.
    fn apply_diagonal(&self, phase: &dyn Fn(usize) -> C<T>) -> Self;

    fn apply_gate(&self, gate: &TwoQubitGate<T>, i: usize, j: usize) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(gate, i, j)?;
        Ok(out)
    }

    fn expectation_sum(&self, obs: &PauliSum<T>) -> Result<T> {
        if obs.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), got: obs.n_qubits() });
        }
        obs.terms().iter().map(|t| self.expectation(t)).sum()
    }
}

/// Bipartition `{A, complement}` of an `n`-site register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    n: usize,
    part: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, part: &[usize]) -> Result<Self> {
        let part = normalize_subset(n, part)?;
        if part.len() == n {
            return Err(Error::TrivialBipartition);
        }
        Ok(Self { n, part })
    }

    /// Cut after the first `k` sites of the chain.
    pub fn single_boundary(n: usize, k: usize) -> Result<Self> {
        Self::new(n, &(0..k).collect::<Vec<_>>())
    }

    /// All `2^{n-1} - 1` bipartitions, each listed once with site 0 in `A`.
    pub fn all(n: usize) -> Vec<Self> {
        (1usize..(1 << (n - 1)))
            .map(|mask| {
                let comp: Vec<usize> = (1..n).filter(|s| mask & (1 << (s - 1)) != 0).collect();
                let part: Vec<usize> = (0..n).filter(|s| !comp.contains(s)).collect();
                Self { n, part }
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn part(&self) -> &[usize] {
        &self.part
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|s| !self.part.contains(s)).collect()
    }

    /// Number of chain bonds `(s, s+1)` cut by the partition.
    pub fn boundaries(&self) -> usize {
        (0..self.n.saturating_sub(1))
            .filter(|&s| self.part.contains(&s) != self.part.contains(&(s + 1)))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Scalar> PureState<T> {
    /// Validates dimension and normalization.
    pub fn new(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewQubits { n, min: 1 });
        }
        if n > MAX_PURE_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: amps.len() });
        }
        let s = Self { n, amps };
        let nrm = s.norm_sqr();
        if (nrm - T::one()).abs() > T::unit_tol() {
            return Err(Error::NotNormalized(nrm.to_f64_lossy()));
        }
        Ok(s)
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(n: usize, mut amps: Vec<C<T>>) -> Result<Self> {
        let nrm: T = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if nrm == T::zero() {
            return Err(Error::NotNormalized(0.0));
        }
        for a in &mut amps {
            *a = a.unscale(nrm);
        }
        Self::new(n, amps)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_PURE_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        if index >= 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: index });
        }
        let mut amps = vec![czero(); 1 << n];
        amps[index] = cone();
        Ok(Self { n, amps })
    }

    /// Product basis state from per-site bits, site 0 first.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b != 0));
        Self::basis(bits.len(), idx)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(self.amps.iter().zip(&other.amps).fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Equality modulo a global phase.
    pub fn equals_up_to_phase(&self, other: &Self) -> bool {
        self.overlap(other).map(|f| f >= T::one() - T::of(1e-10)).unwrap_or(false)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_PURE_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Ok(Self { n, amps })
    }

    /// Multiply every amplitude by a diagonal phase function of the basis index.
    pub fn map_diagonal(&self, f: impl Fn(usize) -> C<T>) -> Self {
        Self { n: self.n, amps: self.amps.iter().enumerate().map(|(b, a)| *a * f(b)).collect() }
    }

    pub fn to_mixed(&self) -> Result<MixedState<T>> {
        if self.n > MAX_MIXED_QUBITS {
            return Err(Error::RegisterTooLarge(self.n));
        }
        Ok(MixedState { n: self.n, rho: CMatrix::outer(&self.amps) })
    }

    pub fn reduced_density_matrix(&self, subset: &[usize]) -> Result<MixedState<T>> {
        let keep = normalize_subset(self.n, subset)?;
        let traced: Vec<usize> = (0..self.n).filter(|s| !keep.contains(s)).collect();
        let (da, db) = (1usize << keep.len(), 1usize << traced.len());
        // amplitude matrix M[a, b]; rho_A = M M†
        let mut m = vec![czero::<T>(); da * db];
        for (idx, amp) in self.amps.iter().enumerate() {
            let a = gather_bits(idx, self.n, &keep);
            let b = gather_bits(idx, self.n, &traced);
            m[a * db + b] = *amp;
        }
        let rho = CMatrix::from_fn(da, da, |r, c| {
            let (mr, mc) = (&m[r * db..(r + 1) * db], &m[c * db..(c + 1) * db]);
            mr.iter().zip(mc).fold(czero(), |acc, (x, y)| acc + *x * y.conj())
        });
        Ok(MixedState { n: keep.len(), rho })
    }

    /// Squared Schmidt coefficients across `cut`, descending.
    pub fn schmidt_spectrum(&self, cut: &Bipartition) -> Result<Vec<T>> {
        if cut.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: cut.n() });
        }
        let nrm = self.norm_sqr();
        if (nrm - T::one()).abs() > T::of(1e-10) {
            return Err(Error::NotNormalized(nrm.to_f64_lossy()));
        }
        let comp = cut.complement();
        let smaller = if cut.part().len() <= comp.len() { cut.part().to_vec() } else { comp };
        let rdm = self.reduced_density_matrix(&smaller)?;
        let mut vals = eigvalsh(&rdm.rho);
        vals.reverse();
        Ok(vals)
    }

    pub fn largest_schmidt_weight(&self, cut: &Bipartition) -> Result<T> {
        Ok(self.schmidt_spectrum(cut)?[0])
    }
}

impl<T: Scalar> QuantumState<T> for PureState<T> {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate_mut(&mut self, gate: &TwoQubitGate<T>, i: usize, j: usize) -> Result<()> {
        check_sites(self.n, i, j)?;
        let (mi, mj) = (site_bit(self.n, i), site_bit(self.n, j));
        let g = gate.matrix();
        for base in 0..self.amps.len() {
            if base & (mi | mj) != 0 {
                continue;
            }
            let idx = [base, base | mi, base | mj, base | mi | mj];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = (0..4).fold(czero(), |acc, col| acc + g[r][col] * v[col]);
            }
        }
        Ok(())
    }

    fn expectation(&self, obs: &PauliString<T>) -> Result<T> {
        if obs.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: obs.n_qubits() });
        }
        let mut acc = czero::<T>();
        for (b, amp) in self.amps.iter().enumerate() {
            if amp.re == T::zero() && amp.im == T::zero() {
                continue;
            }
            let (to, ph) = obs.act_on_basis(b);
            acc += self.amps[to].conj() * ph * *amp;
        }
        Ok(acc.re)
    }

    fn apply_local_mut(&mut self, u: &[[C<T>; 2]; 2], site: usize) -> Result<()> {
        if site >= self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        let m = site_bit(self.n, site);
        for b in (0..self.amps.len()).filter(|b| b & m == 0) {
            let (a0, a1) = (self.amps[b], self.amps[b | m]);
            self.amps[b] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[b | m] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(())
    }

    fn basis_probabilities(&self) -> Vec<T> {
        self.probabilities()
    }

    fn fidelity_to(&self, psi: &PureState<T>) -> Result<T> {
        psi.overlap(self)
    }

    fn apply_diagonal(&self, phase: &dyn Fn(usize) -> C<T>) -> Self {
        self.map_diagonal(phase)
    }
}

/// Density matrix of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState<T> {
    n: usize,
    rho: CMatrix<T>,
}

impl<T: Scalar> MixedState<T> {
    /// Checks shape, unit trace and Hermiticity. Positivity is checked by
    /// [`MixedState::check_positive`], which needs a full diagonalization.
    pub fn new(n: usize, rho: CMatrix<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewQubits { n, min: 1 });
        }
        if n > MAX_MIXED_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        if rho.rows() != 1 << n || !rho.is_square() {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: rho.rows() });
        }
        let s = Self { n, rho };
        s.check_trace_hermitian()?;
        Ok(s)
    }

    pub(crate) fn from_matrix_unchecked(n: usize, rho: CMatrix<T>) -> Self {
        Self { n, rho }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_MIXED_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        let dim = 1usize << n;
        let w = creal(T::one() / T::of_usize(dim));
        Ok(Self { n, rho: CMatrix::diagonal(&vec![w; dim]) })
    }

    /// Diagonal state with the given basis probabilities.
    pub fn diagonal(n: usize, probs: &[T]) -> Result<Self> {
        if probs.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: probs.len() });
        }
        let d: Vec<C<T>> = probs.iter().map(|&p| creal(p)).collect();
        Self::new(n, CMatrix::diagonal(&d))
    }

    /// Convex combination `sum_k w_k rho_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(T, &MixedState<T>)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptySubset)?;
        let n = first.1.n;
        let mut total = T::zero();
        let mut rho = CMatrix::zeros(1 << n, 1 << n);
        for (w, s) in parts {
            if s.n != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.n });
            }
            if *w < T::zero() {
                return Err(Error::ProbabilityOutOfRange { name: "mixture weight", value: w.to_f64_lossy() });
            }
            total += *w;
            rho = &rho + &s.rho.scale_real(*w);
        }
        if (total - T::one()).abs() > T::unit_tol() {
            return Err(Error::InvalidDensityMatrix(format!("mixture weights sum to {total}")));
        }
        Ok(Self { n, rho })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.rho
    }

    pub fn trace(&self) -> T {
        self.rho.trace().re
    }

    pub fn check_trace_hermitian(&self) -> Result<()> {
        let tr = self.rho.trace();
        if (tr.re - T::one()).abs() > T::unit_tol() || tr.im.abs() > T::unit_tol() {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        if !self.rho.is_hermitian(T::unit_tol()) {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        eigvalsh(&self.rho)
    }

    pub fn check_positive(&self) -> Result<()> {
        let min = self.eigenvalues().first().copied().unwrap_or_else(T::zero);
        if min < T::eig_floor() {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    /// Full validation: trace, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        self.check_trace_hermitian()?;
        self.check_positive()
    }

    pub fn purity(&self) -> T {
        self.rho.as_slice().iter().map(|x| x.norm_sqr()).sum()
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity(&self, psi: &PureState<T>) -> Result<T> {
        if psi.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: psi.n_qubits() });
        }
        let v = self.rho.mul_vec(psi.amplitudes());
        Ok(psi.amplitudes().iter().zip(&v).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * *b).re)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_MIXED_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        Ok(Self { n, rho: self.rho.kron(&other.rho) })
    }

    /// `(1 - p) rho + p I / 2^n`.
    pub fn depolarize_globally(&self, p: T) -> Self {
        let dim = self.dim();
        let w = p / T::of_usize(dim);
        let mut rho = self.rho.scale_real(T::one() - p);
        for k in 0..dim {
            rho[(k, k)] += creal(w);
        }
        Self { n: self.n, rho }
    }

    /// `U rho U†` for a diagonal unitary given as a function of the basis index.
    pub fn conjugate_diagonal(&self, f: impl Fn(usize) -> C<T>) -> Self {
        let dim = self.dim();
        let ph: Vec<C<T>> = (0..dim).map(&f).collect();
        Self {
            n: self.n,
            rho: CMatrix::from_fn(dim, dim, |r, c| ph[r] * self.rho[(r, c)] * ph[c].conj()),
        }
    }

    pub fn reduced_density_matrix(&self, subset: &[usize]) -> Result<MixedState<T>> {
        let keep = normalize_subset(self.n, subset)?;
        if keep.len() == self.n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..self.n).filter(|s| !keep.contains(s)).collect();
        let da = 1usize << keep.len();
        let dim = self.dim();
        let mut out = CMatrix::zeros(da, da);
        let keys: Vec<(usize, usize)> =
            (0..dim).map(|i| (gather_bits(i, self.n, &keep), gather_bits(i, self.n, &traced))).collect();
        for r in 0..dim {
            let (ar, br) = keys[r];
            let row = self.rho.row(r);
            for (c, v) in row.iter().enumerate() {
                let (ac, bc) = keys[c];
                if br == bc {
                    out[(ar, ac)] += *v;
                }
            }
        }
        Ok(MixedState { n: keep.len(), rho: out })
    }

    /// Two-qubit depolarizing channel on `(i, j)` with probability `p`:
    /// `(1 - p) rho + p (I/4)_{ij} ⊗ Tr_{ij} rho`.
    pub fn depolarize_pair(&mut self, i: usize, j: usize, p: T) -> Result<()> {
        check_sites(self.n, i, j)?;
        if !(T::zero()..=T::one()).contains(&p) {
            return Err(Error::ProbabilityOutOfRange { name: "depolarizing p", value: p.to_f64_lossy() });
        }
        if p == T::zero() {
            return Ok(());
        }
        let (mi, mj) = (site_bit(self.n, i), site_bit(self.n, j));
        let mask = mi | mj;
        let dim = self.dim();
        let quarter = T::of(0.25);
        let mut out = self.rho.scale_real(T::one() - p);
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            for c in 0..dim {
                if c & mask != 0 {
                    continue;
                }
                let reduced = [0, mi, mj, mi | mj]
                    .iter()
                    .fold(czero::<T>(), |acc, &k| acc + self.rho[(r | k, c | k)]);
                let add = reduced.scale(p * quarter);
                for &k in &[0, mi, mj, mi | mj] {
                    out[(r | k, c | k)] += add;
                }
            }
        }
        self.rho = out;
        Ok(())
    }
}

impl<T: Scalar> QuantumState<T> for MixedState<T> {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate_mut(&mut self, gate: &TwoQubitGate<T>, i: usize, j: usize) -> Result<()> {
        check_sites(self.n, i, j)?;
        let (mi, mj) = (site_bit(self.n, i), site_bit(self.n, j));
        let g = gate.matrix();
        let dim = self.dim();
        let bases: Vec<usize> = (0..dim).filter(|b| b & (mi | mj) == 0).collect();
        // rows: rho <- G rho
        for &base in &bases {
            let idx = [base, base | mi, base | mj, base | mi | mj];
            for c in 0..dim {
                let v = idx.map(|k| self.rho[(k, c)]);
                for (r, &k) in idx.iter().enumerate() {
                    self.rho[(k, c)] = (0..4).fold(czero(), |acc, col| acc + g[r][col] * v[col]);
                }
            }
        }
        // columns: rho <- rho G†
        for r in 0..dim {
            for &base in &bases {
                let idx = [base, base | mi, base | mj, base | mi | mj];
                let v = idx.map(|k| self.rho[(r, k)]);
                for (cidx, &k) in idx.iter().enumerate() {
                    self.rho[(r, k)] = (0..4).fold(czero(), |acc, col| acc + g[cidx][col].conj() * v[col]);
                }
            }
        }
        Ok(())
    }

    fn expectation(&self, obs: &PauliString<T>) -> Result<T> {
        if obs.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: obs.n_qubits() });
        }
        let mut acc = czero::<T>();
        for b in 0..self.dim() {
            let (to, ph) = obs.act_on_basis(b);
            acc += self.rho[(b, to)] * ph;
        }
        Ok(acc.re)
    }

    fn apply_local_mut(&mut self, u: &[[C<T>; 2]; 2], site: usize) -> Result<()> {
        if site >= self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        let m = site_bit(self.n, site);
        let dim = self.dim();
        for b in (0..dim).filter(|b| b & m == 0) {
            for c in 0..dim {
                let (r0, r1) = (self.rho[(b, c)], self.rho[(b | m, c)]);
                self.rho[(b, c)] = u[0][0] * r0 + u[0][1] * r1;
                self.rho[(b | m, c)] = u[1][0] * r0 + u[1][1] * r1;
            }
        }
        for r in 0..dim {
            for b in (0..dim).filter(|b| b & m == 0) {
                let (c0, c1) = (self.rho[(r, b)], self.rho[(r, b | m)]);
                self.rho[(r, b)] = c0 * u[0][0].conj() + c1 * u[0][1].conj();
                self.rho[(r, b | m)] = c0 * u[1][0].conj() + c1 * u[1][1].conj();
            }
        }
        Ok(())
    }

    fn basis_probabilities(&self) -> Vec<T> {
        (0..self.dim()).map(|k| self.rho[(k, k)].re).collect()
    }

    fn fidelity_to(&self, psi: &PureState<T>) -> Result<T> {
        self.fidelity(psi)
    }

    fn apply_diagonal(&self, phase: &dyn Fn(usize) -> C<T>) -> Self {
        self.conjugate_diagonal(phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_01_10() -> PureState<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, vec![czero(), c(h, 0.0), c(h, 0.0), czero()]).unwrap()
    }

    #[test]
    fn sqrt_swap_dag_on_10() {
        let s = PureState::<f64>::from_bits(&[1, 0]).unwrap();
        let out = s.apply_gate(&TwoQubitGate::sqrt_swap_dag(), 0, 1).unwrap();
        // |10> is index 2, |01> is index 1
        assert!((out.amplitude(2) - c(0.5, -0.5)).norm() < 1e-15);
        assert!((out.amplitude(1) - c(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn identity_gate_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random::random_pure::<f64, _>(4, &mut rng);
        let out = s.apply_gate(&TwoQubitGate::identity(), 1, 3).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn sqrt_swap_then_dagger_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random::random_pure::<f64, _>(5, &mut rng);
        let out = s
            .apply_gate(&TwoQubitGate::sqrt_swap(), 3, 1)
            .unwrap()
            .apply_gate(&TwoQubitGate::sqrt_swap_dag(), 3, 1)
            .unwrap();
        let diff: f64 = out.amplitudes().iter().zip(s.amplitudes()).map(|(a, b)| (a - b).norm()).sum();
        assert!(diff < 1e-12);
    }

    #[test]
    fn gate_site_errors() {
        let s = PureState::<f64>::basis(3, 0).unwrap();
        let g = TwoQubitGate::sqrt_swap_dag();
        assert_eq!(s.apply_gate(&g, 1, 1).unwrap_err(), Error::EqualSites(1));
        assert!(matches!(s.apply_gate(&g, 0, 3), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn pure_gate_agrees_with_dense_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random::random_pure::<f64, _>(4, &mut rng);
        let g = TwoQubitGate::sqrt_swap_dag().then(&TwoQubitGate::phase());
        let out = s.apply_gate(&g, 2, 0).unwrap();
        let dense = g.embed(4, 2, 0).mul_vec(s.amplitudes());
        let diff: f64 = out.amplitudes().iter().zip(&dense).map(|(a, b)| (a - b).norm()).sum();
        assert!(diff < 1e-12);
    }

    #[test]
    fn mixed_gate_agrees_with_dense_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random::random_mixed::<f64, _>(3, 3, &mut rng);
        let g = TwoQubitGate::sqrt_swap_dag();
        let out = rho.apply_gate(&g, 0, 2).unwrap();
        let u = g.embed(3, 0, 2);
        let dense = u.matmul(rho.matrix()).matmul(&u.adjoint());
        assert!(out.matrix().max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn bell_pair_single_qubit_is_maximally_mixed() {
        let rdm = bell_01_10().reduced_density_matrix(&[1]).unwrap();
        let id = MixedState::<f64>::maximally_mixed(1).unwrap();
        assert!(rdm.matrix().max_abs_diff(id.matrix()) < 1e-15);
    }

    #[test]
    fn rdm_of_everything_is_the_projector() {
        let s = bell_01_10();
        let rdm = s.reduced_density_matrix(&[0, 1]).unwrap();
        assert!(rdm.matrix().max_abs_diff(&CMatrix::outer(s.amplitudes())) < 1e-15);
        assert_eq!(s.reduced_density_matrix(&[]).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn bell_schmidt_spectrum_is_flat() {
        let cut = Bipartition::new(2, &[0]).unwrap();
        let spec = bell_01_10().schmidt_spectrum(&cut).unwrap();
        assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schmidt_rejects_unnormalized() {
        let s = PureState { n: 2, amps: vec![c::<f64>(1.0, 0.0), c(1.0, 0.0), czero(), czero()] };
        let cut = Bipartition::new(2, &[0]).unwrap();
        assert!(matches!(s.schmidt_spectrum(&cut), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn bipartition_enumeration_count() {
        assert_eq!(Bipartition::all(6).len(), 31);
        assert!(Bipartition::new(3, &[0, 1, 2]).is_err());
        assert_eq!(Bipartition::single_boundary(6, 2).unwrap().boundaries(), 1);
    }

    #[test]
    fn xx_on_bell_is_one() {
        let xx = PauliString::from_letters("XX", 1.0).unwrap();
        assert!((bell_01_10().expectation(&xx).unwrap() - 1.0).abs() < 1e-15);
        let rho = bell_01_10().to_mixed().unwrap();
        assert!((rho.expectation(&xx).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_state_purity_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random::random_pure::<f64, _>(4, &mut rng);
        assert!((s.to_mixed().unwrap().purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn white_noise_fidelity_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = random::random_pure::<f64, _>(4, &mut rng);
        let p = 0.3;
        let rho = s.to_mixed().unwrap().depolarize_globally(p);
        let f = rho.fidelity(&s).unwrap();
        assert!((f - ((1.0 - p) + p / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let rho = MixedState::<f64>::maximally_mixed(2).unwrap();
        let s = PureState::<f64>::basis(3, 0).unwrap();
        assert!(matches!(rho.fidelity(&s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pair_depolarizing_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random::random_mixed::<f64, _>(3, 2, &mut rng);
        let mut out = rho.clone();
        out.depolarize_pair(0, 2, 1.0).unwrap();
        // full depolarization leaves I/4 ⊗ rho_1 with the site order (0, 1, 2)
        let r1 = rho.reduced_density_matrix(&[1]).unwrap();
        for b in 0..8usize {
            for d in 0..8usize {
                let same_outer = (b & 0b101) == (d & 0b101);
                let expect = if same_outer { r1.matrix()[((b >> 1) & 1, (d >> 1) & 1)] * 0.25 } else { czero() };
                assert!((out.matrix()[(b, d)] - expect).norm() < 1e-12);
            }
        }
        out.validate().unwrap();
    }

    #[test]
    fn f32_state_pipeline_runs() {
        let s = PureState::<f32>::from_bits(&[1, 0]).unwrap();
        let out = s.apply_gate(&TwoQubitGate::sqrt_swap_dag(), 0, 1).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-6);
    }
}
