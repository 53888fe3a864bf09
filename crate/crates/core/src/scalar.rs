//! The floating-point abstraction every numerical routine is generic over.
//!
//! Tolerances live here so that `f32` builds get thresholds that make sense for
//! single precision instead of the `f64` defaults.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar used for amplitudes, weights and energies.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Norm and unitarity checks.
    const UNIT_TOL: f64;
    /// Lowest admissible eigenvalue of a density matrix.
    const EIG_FLOOR: f64;
    /// Comparison of derived physical values.
    const VALUE_TOL: f64;
    /// Jacobi sweep convergence threshold relative to the Frobenius norm.
    const JACOBI_EPS: f64;

    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Scalar")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to every Scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn unit_tol() -> Self {
        Self::of(Self::UNIT_TOL)
    }

    fn eig_floor() -> Self {
        Self::of(Self::EIG_FLOOR)
    }

    fn value_tol() -> Self {
        Self::of(Self::VALUE_TOL)
    }
}

impl Scalar for f64 {
    const UNIT_TOL: f64 = 1e-12;
    const EIG_FLOOR: f64 = -1e-10;
    const VALUE_TOL: f64 = 1e-9;
    const JACOBI_EPS: f64 = 1e-15;
}

impl Scalar for f32 {
    const UNIT_TOL: f64 = 1e-5;
    const EIG_FLOOR: f64 = -1e-4;
    const VALUE_TOL: f64 = 1e-4;
    const JACOBI_EPS: f64 = 1e-7;
}

/// Complex number over a [`Scalar`].
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Scalar>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

#[inline]
pub fn czero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Scalar>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn creal<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// e^{i phi}
#[inline]
pub fn cis<T: Scalar>(phi: T) -> C<T> {
    Complex::new(phi.cos(), phi.sin())
}
