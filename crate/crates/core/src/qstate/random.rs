//! Haar-like random states for property tests and oracle comparisons.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::qstate::{MixedState, PureState};
use crate::scalar::{Scalar, C};

fn gaussian_complex<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::of(re), T::of(im))
}

/// Unitarily invariant random pure state.
pub fn random_pure<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState<T> {
    let amps = (0..1usize << n).map(|_| gaussian_complex(rng)).collect();
    PureState::normalized(n, amps).expect("gaussian vector is non-zero")
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a `2^n x rank` Ginibre matrix.
pub fn random_mixed<T: Scalar, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> MixedState<T> {
    let dim = 1usize << n;
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian_complex(rng));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    let mut rho = rho.scale_real(T::one() / tr);
    // symmetrize away rounding so the Hermiticity check is exact
    let herm = CMatrix::from_fn(dim, dim, |r, c| (rho[(r, c)] + rho[(c, r)].conj()).scale(T::of(0.5)));
    rho = herm;
    MixedState::from_matrix_unchecked(n, rho)
}

/// `rho_A ⊗ rho_B` with `A` the first `a` sites and both factors random of full rank.
pub fn random_product_mixed<T: Scalar, R: Rng + ?Sized>(a: usize, b: usize, rng: &mut R) -> MixedState<T> {
    let ra = random_mixed(a, 1 << a, rng);
    let rb = random_mixed(b, 1 << b, rng);
    ra.kron(&rb).expect("product stays within the mixed-state cap")
}
