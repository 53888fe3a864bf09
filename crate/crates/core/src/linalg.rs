//! Dense complex matrices and a Hermitian eigensolver.
//!
//! Matrices here are small (at most a few thousand rows for density matrices,
//! a few hundred for Fock-space Hamiltonians), so a row-major `Vec` and a
//! cyclic Jacobi solver are enough and keep everything generic over [`Scalar`].

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::scalar::{cis, cone, czero, Scalar, C};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Row-major construction. Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    pub fn diagonal(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// |v><v|
    pub fn outer(v: &[C<T>]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(czero(), |a, b| a + b)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.scale(s)).collect() }
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(czero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * *b;
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.is_square() && self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Add for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Scalar> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

/// Eigen-decomposition of a Hermitian matrix: `a = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    /// V f(diag) V† for a function of the eigenvalues.
    pub fn map(&self, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            let fk = fv[k];
            for r in 0..n {
                let vr = self.vectors[(r, k)] * fk;
                if vr.re == T::zero() && vr.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, k)].conj();
                }
            }
        }
        out
    }

    /// exp(-i H t) for the decomposed Hamiltonian.
    pub fn propagator(&self, t: T) -> CMatrix<T> {
        self.map(|e| cis(-e * t))
    }
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Only the Hermitian part of `a` is used. Eigenvalues are returned ascending.
pub fn eigh<T: Scalar>(a: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    let half = T::of(0.5);
    let mut m = CMatrix::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()).scale(half));
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(T::min_positive_value());
    let eps = T::of(T::JACOBI_EPS) * scale;

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= eps {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value() || r <= eps * T::of(1e-3) / T::of_usize(n.max(1)) {
                    continue;
                }
                let e = apq.unscale(r);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (r + r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                let jpq = e.scale(sn);
                let jqp = -e.conj().scale(sn);
                // M <- M J (columns p, q)
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp.scale(cs) + mkq * jqp;
                    m[(k, q)] = mkp * jpq + mkq.scale(cs);
                }
                // M <- J† M (rows p, q)
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk.scale(cs) + mqk * jqp.conj();
                    m[(q, k)] = mpk * jpq.conj() + mqk.scale(cs);
                }
                m[(p, q)] = czero();
                m[(q, p)] = czero();
                m[(p, p)].im = T::zero();
                m[(q, q)].im = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp.scale(cs) + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq.scale(cs);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.partial_cmp(&m[(y, y)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh<T: Scalar>(a: &CMatrix<T>) -> Vec<T> {
    eigh(a).values
}
