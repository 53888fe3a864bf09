use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, cis, cone, czero, Scalar, C};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateLabel {
    SqrtSwapDag,
    SqrtSwap,
    Phase,
    PhaseDag,
    Identity,
    Custom(String),
}

/// A two-qubit unitary.
///
/// The matrix is stored in the basis order `|00>, |10>, |01>, |11>`, where the
/// first symbol belongs to the first site of the placement `(i, j)`. In that
/// order the local index is `b_i + 2 * b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGate<T> {
    label: GateLabel,
    matrix: [[C<T>; 4]; 4],
}

impl<T: Scalar> TwoQubitGate<T> {
    /// Validates unitarity.
    pub fn new(label: GateLabel, matrix: [[C<T>; 4]; 4]) -> Result<Self> {
        let gate = Self { label, matrix };
        if !gate.to_cmatrix().is_unitary(T::unit_tol()) {
            return Err(Error::Numerical(format!("gate {:?} is not unitary", gate.label)));
        }
        Ok(gate)
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(label: GateLabel, matrix: [[C<T>; 4]; 4]) -> Self {
        Self { label, matrix }
    }

    pub fn identity() -> Self {
        let mut m = [[czero(); 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = cone();
        }
        Self { label: GateLabel::Identity, matrix: m }
    }

    /// The superexchange gate obtained after a quarter of the swap time.
    pub fn sqrt_swap_dag() -> Self {
        let a = c::<T>(0.5, -0.5);
        let b = c::<T>(0.5, 0.5);
        let (o, z) = (cone(), czero());
        Self {
            label: GateLabel::SqrtSwapDag,
            matrix: [[o, z, z, z], [z, a, b, z], [z, b, a, z], [z, z, z, o]],
        }
    }

    pub fn sqrt_swap() -> Self {
        let mut g = Self::sqrt_swap_dag().adjoint();
        g.label = GateLabel::SqrtSwap;
        g
    }

    /// sqrt(SWAP) realised as three consecutive sqrt(SWAP)-dagger pulses.
    pub fn sqrt_swap_via_cube() -> Self {
        let d = Self::sqrt_swap_dag();
        let mut g = d.then(&d).then(&d);
        g.label = GateLabel::SqrtSwap;
        g
    }

    /// Diagonal gate putting e^{i pi/2} on `|10>` and 1 elsewhere.
    pub fn phase() -> Self {
        let mut m = [[czero(); 4]; 4];
        m[0][0] = cone();
        m[1][1] = c(0.0, 1.0);
        m[2][2] = cone();
        m[3][3] = cone();
        Self { label: GateLabel::Phase, matrix: m }
    }

    pub fn phase_dag() -> Self {
        let mut g = Self::phase().adjoint();
        g.label = GateLabel::PhaseDag;
        g
    }

    /// Diagonal gate with arbitrary phases on `|00>, |10>, |01>, |11>`.
    pub fn diagonal_phases(label: GateLabel, phases: [T; 4]) -> Self {
        let mut m = [[czero(); 4]; 4];
        for k in 0..4 {
            m[k][k] = cis(phases[k]);
        }
        Self { label, matrix: m }
    }

    pub fn label(&self) -> &GateLabel {
        &self.label
    }

    pub fn matrix(&self) -> &[[C<T>; 4]; 4] {
        &self.matrix
    }

    pub fn to_cmatrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(4, 4, |r, c| self.matrix[r][c])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[czero(); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = self.matrix[c][r].conj();
            }
        }
        let label = match &self.label {
            GateLabel::SqrtSwapDag => GateLabel::SqrtSwap,
            GateLabel::SqrtSwap => GateLabel::SqrtSwapDag,
            GateLabel::Phase => GateLabel::PhaseDag,
            GateLabel::PhaseDag => GateLabel::Phase,
            GateLabel::Identity => GateLabel::Identity,
            GateLabel::Custom(s) => GateLabel::Custom(format!("{s}^dag")),
        };
        Self { label, matrix: m }
    }

    /// `other * self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        let mut m = [[czero(); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = (0..4).fold(czero(), |acc, k| acc + other.matrix[r][k] * self.matrix[k][c]);
            }
        }
        Self {
            label: GateLabel::Custom(format!("{:?}*{:?}", other.label, self.label)),
            matrix: m,
        }
    }

    /// Phase-insensitive closeness `|Tr(A† B)| / 4`.
    pub fn overlap(&self, other: &Self) -> T {
        let mut acc = czero::<T>();
        for r in 0..4 {
            for c in 0..4 {
                acc += self.matrix[r][c].conj() * other.matrix[r][c];
            }
        }
        acc.norm() / T::of(4.0)
    }

    /// Dense `2^n x 2^n` embedding acting on sites `(i, j)`; test oracle only.
    pub fn embed(&self, n: usize, i: usize, j: usize) -> CMatrix<T> {
        let dim = 1usize << n;
        let mi = 1usize << (n - 1 - i);
        let mj = 1usize << (n - 1 - j);
        CMatrix::from_fn(dim, dim, |r, col| {
            let rest = !(mi | mj);
            if r & rest != col & rest {
                return czero();
            }
            let lr = usize::from(r & mi != 0) + 2 * usize::from(r & mj != 0);
            let lc = usize::from(col & mi != 0) + 2 * usize::from(col & mj != 0);
            self.matrix[lr][lc]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_swap_dag_squares_to_swap() {
        let g = TwoQubitGate::<f64>::sqrt_swap_dag();
        let sq = g.then(&g);
        // SWAP exchanges |10> and |01>
        assert!((sq.matrix()[1][2] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((sq.matrix()[2][1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(sq.matrix()[1][1].norm() < 1e-15);
    }

    #[test]
    fn cube_of_dagger_is_sqrt_swap() {
        let cube = TwoQubitGate::<f64>::sqrt_swap_via_cube();
        let direct = TwoQubitGate::<f64>::sqrt_swap();
        assert!(cube.to_cmatrix().max_abs_diff(&direct.to_cmatrix()) < 1e-15);
    }

    #[test]
    fn all_named_gates_are_unitary() {
        for g in [
            TwoQubitGate::<f64>::sqrt_swap_dag(),
            TwoQubitGate::sqrt_swap(),
            TwoQubitGate::phase(),
            TwoQubitGate::phase_dag(),
            TwoQubitGate::identity(),
        ] {
            assert!(g.to_cmatrix().is_unitary(1e-12), "{:?}", g.label());
        }
    }

    #[test]
    fn new_rejects_non_unitary() {
        let mut m = [[czero::<f64>(); 4]; 4];
        m[0][0] = c(2.0, 0.0);
        assert!(TwoQubitGate::new(GateLabel::Custom("bad".into()), m).is_err());
    }

    #[test]
    fn overlap_ignores_global_phase() {
        let g = TwoQubitGate::<f64>::sqrt_swap_dag();
        let mut m = *g.matrix();
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x *= cis(1.234);
            }
        }
        let h = TwoQubitGate::new_unchecked(GateLabel::Custom("rot".into()), m);
        assert!((g.overlap(&h) - 1.0).abs() < 1e-14);
    }
}
