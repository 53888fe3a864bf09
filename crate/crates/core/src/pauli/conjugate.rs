use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::string::{Pauli, PauliString};
use crate::pauli::sum::PauliSum;
use crate::qstate::TwoQubitGate;
use crate::scalar::{czero, Scalar};

/// Real 16x16 action of `A -> G A G†` on two-qubit Pauli products.
///
/// Row `4a + b` holds the expansion of `P_a ⊗ P_b` (letter `a` on the first
/// placement site, `b` on the second) in the same basis. Entries are real
/// because conjugation by a unitary preserves Hermiticity.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationTable {
    coeffs: [[f64; 16]; 16],
}

impl ConjugationTable {
    pub fn from_gate<T: Scalar>(gate: &TwoQubitGate<T>) -> Self {
        let g = gate.matrix();
        let pauli_pair = |a: Pauli, b: Pauli| {
            let (ma, mb) = (a.matrix::<T>(), b.matrix::<T>());
            let mut m = [[czero::<T>(); 4]; 4];
            for (r, row) in m.iter_mut().enumerate() {
                for (c, x) in row.iter_mut().enumerate() {
                    *x = ma[r & 1][c & 1] * mb[r >> 1][c >> 1];
                }
            }
            m
        };
        let mut coeffs = [[0.0; 16]; 16];
        for (ia, &a) in Pauli::ALL.iter().enumerate() {
            for (ib, &b) in Pauli::ALL.iter().enumerate() {
                let p = pauli_pair(a, b);
                // G P G†
                let mut gp = [[czero::<T>(); 4]; 4];
                for r in 0..4 {
                    for c in 0..4 {
                        gp[r][c] = (0..4).fold(czero(), |acc, k| acc + g[r][k] * p[k][c]);
                    }
                }
                let mut conj = [[czero::<T>(); 4]; 4];
                for r in 0..4 {
                    for c in 0..4 {
                        conj[r][c] = (0..4).fold(czero(), |acc, k| acc + gp[r][k] * g[c][k].conj());
                    }
                }
                for (ic, &cl) in Pauli::ALL.iter().enumerate() {
                    for (id, &dl) in Pauli::ALL.iter().enumerate() {
                        let q = pauli_pair(cl, dl);
                        // Tr(Q M) / 4, Q Hermitian
                        let mut tr = czero::<T>();
                        for r in 0..4 {
                            for k in 0..4 {
                                tr += q[r][k] * conj[k][r];
                            }
                        }
                        coeffs[4 * ia + ib][4 * ic + id] = tr.re.to_f64_lossy() / 4.0;
                    }
                }
            }
        }
        // snap rounding noise so exact zeros stay zero
        for row in coeffs.iter_mut() {
            for x in row.iter_mut() {
                if x.abs() < 1e-14 {
                    *x = 0.0;
                }
            }
        }
        Self { coeffs }
    }

    /// Non-zero `(first, second, coefficient)` triples for `a ⊗ b`.
    pub fn image(&self, a: Pauli, b: Pauli) -> impl Iterator<Item = (Pauli, Pauli, f64)> + '_ {
        let row = &self.coeffs[4 * a as usize + b as usize];
        row.iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(k, &w)| (Pauli::ALL[k / 4], Pauli::ALL[k % 4], w))
    }

    pub fn coefficient(&self, from: (Pauli, Pauli), to: (Pauli, Pauli)) -> f64 {
        self.coeffs[4 * from.0 as usize + from.1 as usize][4 * to.0 as usize + to.1 as usize]
    }
}

/// Table for the superexchange gate, built once from its dense matrix.
pub fn conjugation_table() -> &'static ConjugationTable {
    static TABLE: OnceLock<ConjugationTable> = OnceLock::new();
    TABLE.get_or_init(|| ConjugationTable::from_gate(&TwoQubitGate::<f64>::sqrt_swap_dag()))
}

fn check_placements(n: usize, pairs: &[(usize, usize)]) -> Result<()> {
    let mut used = BTreeSet::new();
    for &(i, j) in pairs {
        crate::qstate::check_sites(n, i, j)?;
        for s in [i, j] {
            if !used.insert(s) {
                return Err(Error::OverlappingGates(s));
            }
        }
    }
    Ok(())
}

/// Expand `G S G†` for a layer of disjoint gates.
pub fn conjugate_with<T: Scalar>(
    table: &ConjugationTable,
    s: &PauliString<T>,
    pairs: &[(usize, usize)],
) -> Result<PauliSum<T>> {
    let n = s.n_qubits();
    check_placements(n, pairs)?;
    let mut terms = vec![s.clone()];
    for &(i, j) in pairs {
        if s.letter(i) == Pauli::I && s.letter(j) == Pauli::I {
            continue;
        }
        terms = terms
            .iter()
            .flat_map(|t| {
                table
                    .image(t.letter(i), t.letter(j))
                    .map(move |(a, b, w)| t.with_letters_at(&[i, j], &[a, b]).with_weight(t.weight() * T::of(w)))
            })
            .collect();
    }
    Ok(PauliSum::canonical(n, terms))
}

pub fn conjugate_by_sqrtswapdag<T: Scalar>(s: &PauliString<T>, pairs: &[(usize, usize)]) -> Result<PauliSum<T>> {
    conjugate_with(conjugation_table(), s, pairs)
}

/// `X X` and `-Z Z` on each first-layer pair, in pair order.
pub fn bell_stabilizers<T: Scalar>(n: usize) -> Result<Vec<PauliString<T>>> {
    if n < 2 {
        return Err(Error::TooFewQubits { n, min: 2 });
    }
    if n % 2 == 1 {
        return Err(Error::OddQubitCount(n));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n / 2 {
        let pair = [2 * k, 2 * k + 1];
        out.push(PauliString::homogeneous(n, &pair, Pauli::X)?);
        out.push(PauliString::homogeneous(n, &pair, Pauli::Z)?.with_weight(-T::one()));
    }
    Ok(out)
}

/// Second-layer placements `(2k+1, 2k+2)`.
pub fn second_layer_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..(n / 2).saturating_sub(1)).map(|k| (2 * k + 1, 2 * k + 2)).collect()
}

/// Stabilizers of the target state: Bell stabilizers pushed through the second layer.
pub fn conjugated_stabilizers<T: Scalar>(n: usize) -> Result<Vec<PauliSum<T>>> {
    if n % 2 == 1 {
        return Err(Error::OddQubitCount(n));
    }
    if n < 4 {
        return Err(Error::TooFewQubits { n, min: 4 });
    }
    let pairs = second_layer_pairs(n);
    bell_stabilizers::<T>(n)?.iter().map(|s| conjugate_by_sqrtswapdag(s, &pairs)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCensus {
    pub per_stabilizer: Vec<usize>,
    /// Terms counted with multiplicity across stabilizers.
    pub raw: usize,
    /// Distinct letter strings across all stabilizers.
    pub distinct: usize,
}

pub fn term_census<T: Scalar>(sums: &[PauliSum<T>]) -> TermCensus {
    let per_stabilizer: Vec<usize> = sums.iter().map(PauliSum::len).collect();
    let distinct: BTreeSet<String> =
        sums.iter().flat_map(|s| s.terms().iter().map(PauliString::letter_string)).collect();
    TermCensus { raw: per_stabilizer.iter().sum(), per_stabilizer, distinct: distinct.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    fn sum_of(n: usize, terms: &[(&str, f64)]) -> PauliSum<f64> {
        PauliSum::new(n, terms.iter().map(|(l, w)| PauliString::from_letters(l, *w).unwrap()).collect()).unwrap()
    }

    #[test]
    fn x_on_first_site_expands_to_four_terms() {
        let xi = PauliString::<f64>::from_letters("XI", 1.0).unwrap();
        let out = conjugate_by_sqrtswapdag(&xi, &[(0, 1)]).unwrap();
        let expect = sum_of(2, &[("XI", 0.5), ("IX", 0.5), ("YZ", -0.5), ("ZY", 0.5)]);
        assert_eq!(out.len(), 4);
        assert!(out.add(&expect.scale(-1.0)).unwrap().is_empty());
    }

    #[test]
    fn x_on_second_site_expands_with_opposite_cross_terms() {
        let ix = PauliString::<f64>::from_letters("IX", 1.0).unwrap();
        let out = conjugate_by_sqrtswapdag(&ix, &[(0, 1)]).unwrap();
        let expect = sum_of(2, &[("XI", 0.5), ("IX", 0.5), ("YZ", 0.5), ("ZY", -0.5)]);
        assert!(out.add(&expect.scale(-1.0)).unwrap().is_empty());
    }

    #[test]
    fn first_stabilizer_has_four_terms() {
        let s = &bell_stabilizers::<f64>(4).unwrap()[0];
        let out = conjugate_by_sqrtswapdag(s, &[(1, 2)]).unwrap();
        let expect = sum_of(4, &[("XXII", 0.5), ("XIXI", 0.5), ("XYZI", -0.5), ("XZYI", 0.5)]);
        assert!(out.add(&expect.scale(-1.0)).unwrap().is_empty());
    }

    #[test]
    fn disjoint_gate_leaves_string_alone() {
        let zz = PauliString::<f64>::from_letters("ZZII", 1.0).unwrap();
        let out = conjugate_by_sqrtswapdag(&zz, &[(2, 3)]).unwrap();
        assert_eq!(out, PauliSum::from_string(zz));
    }

    #[test]
    fn overlapping_placements_rejected() {
        let zz = PauliString::<f64>::from_letters("ZZII", 1.0).unwrap();
        assert_eq!(conjugate_by_sqrtswapdag(&zz, &[(0, 1), (1, 2)]).unwrap_err(), Error::OverlappingGates(1));
    }

    #[test]
    fn bell_stabilizer_layout() {
        let s = bell_stabilizers::<f64>(2).unwrap();
        assert_eq!(s[0].letter_string(), "XX");
        assert_eq!(s[1].letter_string(), "ZZ");
        assert_eq!(s[1].weight(), -1.0);
        assert_eq!(bell_stabilizers::<f64>(4).unwrap().len(), 4);
        assert_eq!(bell_stabilizers::<f64>(5).unwrap_err(), Error::OddQubitCount(5));
    }

    #[test]
    fn table_matches_dense_conjugation_for_all_pairs() {
        let g = TwoQubitGate::<f64>::sqrt_swap_dag().embed(2, 0, 1);
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                if a == Pauli::I && b == Pauli::I {
                    continue;
                }
                let p = PauliString::<f64>::new(&[a, b], 1.0).unwrap();
                let dense = g.matmul(&p.to_dense()).matmul(&g.adjoint());
                let sym = conjugate_by_sqrtswapdag(&p, &[(0, 1)]).unwrap();
                assert!(sym.to_dense().max_abs_diff(&dense) < 1e-12, "{a:?}{b:?}");
            }
        }
    }

    #[test]
    fn reversed_placement_matches_dense() {
        let p = PauliString::<f64>::from_letters("XYZ", 1.0).unwrap();
        let g = TwoQubitGate::<f64>::sqrt_swap_dag().embed(3, 2, 0);
        let dense: CMatrix<f64> = g.matmul(&p.to_dense()).matmul(&g.adjoint());
        let sym = conjugate_by_sqrtswapdag(&p, &[(2, 0)]).unwrap();
        assert!(sym.to_dense().max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn census_for_ten_sites() {
        let sums = conjugated_stabilizers::<f64>(10).unwrap();
        let c = term_census(&sums);
        assert_eq!(c.per_stabilizer, vec![4, 4, 16, 16, 16, 16, 16, 16, 4, 4]);
        assert_eq!(c.raw, 112);
        assert_eq!(c.distinct, 112);
    }
}
