use crate::error::Result;
use crate::pauli::{Pauli, PauliString};
use crate::qstate::{MixedState, QuantumState};
use crate::scalar::{cis, creal, Scalar};

/// Phase of the collective rotation `exp(i theta Z / 2)` on every site,
/// i.e. the adjoint of `U_theta` tensored over the register.
fn inverse_rotation_phase<T: Scalar>(n: usize, theta: T) -> impl Fn(usize) -> crate::scalar::C<T> {
    move |b: usize| {
        let excess = T::of_usize(n) - T::of(2.0) * T::of_usize(b.count_ones() as usize);
        cis(theta * excess * T::of(0.5))
    }
}

/// `<X_theta^{⊗n}>` with `X_theta = cos(theta) X + sin(theta) Y`.
pub fn rotated_expectation<T: Scalar, S: QuantumState<T>>(state: &S, theta: T) -> Result<T> {
    let n = state.n_qubits();
    let rotated = state.apply_diagonal(&inverse_rotation_phase(n, theta));
    rotated.expectation(&PauliString::homogeneous(n, &(0..n).collect::<Vec<_>>(), Pauli::X)?)
}

/// Average of `U rho U†` over `points` equally spaced collective rotation angles.
pub fn twirl<T: Scalar>(rho: &MixedState<T>, points: usize) -> Result<MixedState<T>> {
    let n = rho.n_qubits();
    let w = T::one() / T::of_usize(points);
    let parts: Vec<MixedState<T>> = (0..points)
        .map(|k| {
            let theta = T::TAU() * T::of_usize(k) / T::of_usize(points);
            // U = exp(-i theta Z / 2) is the inverse rotation at -theta
            rho.conjugate_diagonal(inverse_rotation_phase(n, -theta))
        })
        .collect();
    MixedState::mixture(&parts.iter().map(|p| (w, p)).collect::<Vec<_>>())
}

/// Exact twirl: keep only coherences between basis states of equal weight.
pub fn twirl_exact<T: Scalar>(rho: &MixedState<T>) -> MixedState<T> {
    let dim = rho.dim();
    let m = crate::linalg::CMatrix::from_fn(dim, dim, |r, c| {
        if r.count_ones() == c.count_ones() {
            rho.matrix()[(r, c)]
        } else {
            creal(T::zero())
        }
    });
    MixedState::from_matrix_unchecked(rho.n_qubits(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::target_state;
    use crate::qstate::random::random_mixed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_angle_is_plain_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_mixed::<f64, _>(3, 2, &mut rng);
        let x = PauliString::from_letters("XXX", 1.0).unwrap();
        assert!((rotated_expectation(&rho, 0.0).unwrap() - rho.expectation(&x).unwrap()).abs() < 1e-14);
        let y = PauliString::from_letters("YYY", 1.0).unwrap();
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((rotated_expectation(&rho, half_pi).unwrap() - rho.expectation(&y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn target_is_rotation_invariant() {
        let t = target_state::<f64>(6).unwrap();
        let x0 = rotated_expectation(&t, 0.0).unwrap();
        for k in 0..10 {
            assert!((rotated_expectation(&t, 0.37 * k as f64).unwrap() - x0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_average_matches_twirled_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_mixed::<f64, _>(4, 3, &mut rng);
        let points = 16;
        let avg: f64 = (0..points)
            .map(|k| rotated_expectation(&rho, std::f64::consts::TAU * k as f64 / points as f64).unwrap())
            .sum::<f64>()
            / points as f64;
        let sym = twirl(&rho, points).unwrap();
        let x = PauliString::from_letters("XXXX", 1.0).unwrap();
        assert!((avg - sym.expectation(&x).unwrap()).abs() < 1e-12);
        assert!(sym.matrix().max_abs_diff(twirl_exact(&rho).matrix()) < 1e-12);
    }
}
