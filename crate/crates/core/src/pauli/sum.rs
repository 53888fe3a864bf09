use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::string::PauliString;
use crate::scalar::Scalar;

/// Hermitian operator as a real combination of distinct Pauli strings.
///
/// Terms are kept sorted by their letter strings; duplicates are merged and
/// terms whose merged weight falls below the unit tolerance are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: Vec<PauliString<T>>,
}

impl<T: Scalar> PauliSum<T> {
    pub fn new(n: usize, terms: Vec<PauliString<T>>) -> Result<Self> {
        for t in &terms {
            if t.n_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, got: t.n_qubits() });
            }
        }
        Ok(Self::canonical(n, terms))
    }

    pub fn from_string(term: PauliString<T>) -> Self {
        Self { n: term.n_qubits(), terms: vec![term] }
    }

    pub(crate) fn canonical(n: usize, mut terms: Vec<PauliString<T>>) -> Self {
        terms.sort_by(|a, b| a.cmp_letters(b));
        let mut merged: Vec<PauliString<T>> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.same_letters(&t) => {
                    *last = last.with_weight(last.weight() + t.weight());
                }
                _ => merged.push(t),
            }
        }
        let tol = T::unit_tol();
        merged.retain(|t| t.weight().abs() > tol);
        Self { n, terms: merged }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn terms(&self) -> &[PauliString<T>] {
        &self.terms
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_norm_sqr(&self) -> T {
        self.terms.iter().map(|t| t.weight() * t.weight()).sum()
    }

    pub fn abs_weight_sum(&self) -> T {
        self.terms.iter().map(|t| t.weight().abs()).sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::canonical(self.n, self.terms.iter().map(|t| t.with_weight(t.weight() * s)).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self::canonical(self.n, terms))
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            for b in 0..dim {
                let (to, ph) = t.act_on_basis(b);
                m[(to, b)] += ph;
            }
        }
        m
    }

    /// One term per line: `weight letters`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }

    /// Inverse of [`PauliSum::to_text`]. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(w), Some(letters), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected 'weight letters'", lineno + 1)));
            };
            let weight: T = w
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad weight '{w}'", lineno + 1)))?;
            terms.push(PauliString::from_letters(letters, weight)?);
        }
        let n = terms.first().map(|t| t.n_qubits()).ok_or_else(|| Error::Parse("empty Pauli sum".into()))?;
        Self::new(n, terms)
    }
}

impl<T: Scalar> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_merge_and_cancel() {
        let a = PauliString::<f64>::from_letters("XZ", 0.5).unwrap();
        let b = PauliString::<f64>::from_letters("XZ", -0.5).unwrap();
        let c = PauliString::<f64>::from_letters("IZ", 1.0).unwrap();
        let s = PauliSum::new(2, vec![a, c.clone(), b]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].letter_string(), "IZ");
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = PauliSum::new(
            4,
            vec![
                PauliString::<f64>::from_letters("XIXZ", 0.5).unwrap(),
                PauliString::from_letters("YZII", -0.1).unwrap(),
                PauliString::from_letters("IIIX", 1.0 / 3.0).unwrap(),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.contains("0.5 XIXZ"));
        assert_eq!(PauliSum::from_text(&text).unwrap(), s);
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(PauliSum::<f64>::from_text("0.5").is_err());
        assert!(PauliSum::<f64>::from_text("abc XX").is_err());
        assert!(PauliSum::<f64>::from_text("").is_err());
        assert!(PauliSum::<f64>::from_text("1 XX\n1 XXX").is_err());
    }
}
