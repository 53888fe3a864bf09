use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, cone, czero, Scalar, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("invalid Pauli letter '{other}'"))),
        }
    }

    /// 2x2 matrix in the `|0>, |1>` basis.
    pub fn matrix<T: Scalar>(self) -> [[C<T>; 2]; 2] {
        let (o, z) = (cone::<T>(), czero::<T>());
        match self {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }
}

/// A real-weighted tensor product of single-site Pauli operators.
///
/// Site `s` maps to bit `n - 1 - s` of the masks, the same convention as basis
/// indices of [`crate::qstate::PureState`]. Registers are capped at 64 sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString<T> {
    n: usize,
    x: u64,
    z: u64,
    weight: T,
}

impl<T: Scalar> PauliString<T> {
    pub fn new(letters: &[Pauli], weight: T) -> Result<Self> {
        let n = letters.len();
        if n == 0 {
            return Err(Error::TooFewQubits { n, min: 1 });
        }
        if n > 64 {
            return Err(Error::RegisterTooLarge(n));
        }
        if weight == T::zero() {
            return Err(Error::Parse("Pauli string weight must be non-zero".into()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (s, p) in letters.iter().enumerate() {
            let bit = 1u64 << (n - 1 - s);
            let (px, pz) = p.bits();
            if px {
                x |= bit;
            }
            if pz {
                z |= bit;
            }
        }
        Ok(Self { n, x, z, weight })
    }

    /// Parses a letter string such as `"XIYZ"`.
    pub fn from_letters(letters: &str, weight: T) -> Result<Self> {
        let v = letters.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
        Self::new(&v, weight)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(&vec![Pauli::I; n], T::one())
    }

    /// The same letter on every site of `sites`, identity elsewhere.
    pub fn homogeneous(n: usize, sites: &[usize], letter: Pauli) -> Result<Self> {
        let mut v = vec![Pauli::I; n];
        for &s in sites {
            if s >= n {
                return Err(Error::SiteOutOfRange { site: s, n });
            }
            v[s] = letter;
        }
        Self::new(&v, T::one())
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self) -> T {
        self.weight
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn with_weight(&self, weight: T) -> Self {
        Self { weight, ..*self }
    }

    #[inline]
    fn bit(&self, site: usize) -> u64 {
        1u64 << (self.n - 1 - site)
    }

    pub fn letter(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|s| self.letter(s)).collect()
    }

    pub fn letter_string(&self) -> String {
        (0..self.n).map(|s| self.letter(s).as_char()).collect()
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&s| self.letter(s) != Pauli::I).collect()
    }

    pub fn support_size(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x | self.z == 0
    }

    pub fn same_letters(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Lexicographic order of the letter strings with `I < X < Y < Z`.
    pub fn cmp_letters(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for s in 0..self.n {
                let o = self.letter(s).cmp(&other.letter(s));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Overwrite letters on a set of sites.
    pub fn with_letters_at(&self, sites: &[usize], letters: &[Pauli]) -> Self {
        let mut x = self.x;
        let mut z = self.z;
        for (&s, &p) in sites.iter().zip(letters) {
            let b = self.bit(s);
            x &= !b;
            z &= !b;
            let (px, pz) = p.bits();
            if px {
                x |= b;
            }
            if pz {
                z |= b;
            }
        }
        Self { n: self.n, x, z, weight: self.weight }
    }

    /// Action on a computational basis state: `P|b> = phase * |b ^ x>`.
    #[inline]
    pub fn act_on_basis(&self, b: usize) -> (usize, C<T>) {
        let y_count = (self.x & self.z).count_ones();
        let sign_flips = (b as u64 & self.z).count_ones();
        let base = match y_count % 4 {
            0 => c::<T>(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
        let phase = if sign_flips % 2 == 1 { -base } else { base };
        (b ^ self.x as usize, phase.scale(self.weight))
    }

    /// Dense matrix including the weight; test oracle only.
    pub fn to_dense(&self) -> CMatrix<T> {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (to, ph) = self.act_on_basis(b);
            m[(to, b)] = ph;
        }
        m
    }

    /// Sign of the measured parity: `(-1)^{popcount(outcome & support)}`.
    #[inline]
    pub fn outcome_parity(&self, outcome: u64) -> i32 {
        if (outcome & (self.x | self.z)).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl<T: Scalar> fmt::Display for PauliString<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.weight, self.letter_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_round_trip() {
        let p = PauliString::<f64>::from_letters("XIYZ", -0.5).unwrap();
        assert_eq!(p.letter_string(), "XIYZ");
        assert_eq!(p.support(), vec![0, 2, 3]);
        assert_eq!(p.support_size(), 3);
    }

    #[test]
    fn rejects_zero_weight_and_bad_letters() {
        assert!(PauliString::<f64>::from_letters("XX", 0.0).is_err());
        assert!(PauliString::<f64>::from_letters("XQ", 1.0).is_err());
    }

    #[test]
    fn dense_matrix_matches_kron_of_letters() {
        let p = PauliString::<f64>::from_letters("YZ", 1.0).unwrap();
        let y = Pauli::Y.matrix::<f64>();
        let z = Pauli::Z.matrix::<f64>();
        let ym = CMatrix::from_fn(2, 2, |r, c| y[r][c]);
        let zm = CMatrix::from_fn(2, 2, |r, c| z[r][c]);
        assert!(p.to_dense().max_abs_diff(&ym.kron(&zm)) < 1e-15);
    }

    #[test]
    fn commutation_of_xx_and_zz() {
        let xx = PauliString::<f64>::from_letters("XX", 1.0).unwrap();
        let zz = PauliString::<f64>::from_letters("ZZ", 1.0).unwrap();
        let xi = PauliString::<f64>::from_letters("XI", 1.0).unwrap();
        assert!(xx.commutes_with(&zz));
        assert!(!xi.commutes_with(&zz));
    }

    #[test]
    fn lexicographic_order_i_x_y_z() {
        let a = PauliString::<f64>::from_letters("IZ", 1.0).unwrap();
        let b = PauliString::<f64>::from_letters("XI", 1.0).unwrap();
        assert_eq!(a.cmp_letters(&b), Ordering::Less);
    }
}
