use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::conjugate::second_layer_pairs;
use crate::pauli::string::{Pauli, PauliString};
use crate::pauli::sum::PauliSum;
use crate::scalar::Scalar;

/// Reference to term `term` of sum `sum` in the input of [`group_into_lms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermRef {
    pub sum: usize,
    pub term: usize,
}

/// One single-qubit basis per site. Outcome bit `1` at a site is the `-1`
/// eigenvalue of that site's basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementSetting {
    #[serde(with = "letters_serde")]
    bases: Vec<Pauli>,
    resolves: Vec<TermRef>,
}

mod letters_serde {
    use super::Pauli;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Pauli], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.iter().map(|p| p.as_char()).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Pauli>, D::Error> {
        let s = String::deserialize(d)?;
        s.chars()
            .map(|c| match Pauli::from_char(c) {
                Ok(Pauli::I) | Err(_) => Err(serde::de::Error::custom(format!("bad basis letter '{c}'"))),
                Ok(p) => Ok(p),
            })
            .collect()
    }
}

impl MeasurementSetting {
    pub fn new(bases: Vec<Pauli>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::TooFewQubits { n: 0, min: 1 });
        }
        if bases.contains(&Pauli::I) {
            return Err(Error::Parse("measurement basis must be X, Y or Z".into()));
        }
        Ok(Self { bases, resolves: Vec::new() })
    }

    pub fn from_letters(letters: &str) -> Result<Self> {
        Self::new(letters.chars().map(Pauli::from_char).collect::<Result<_>>()?)
    }

    /// The same basis on every site.
    pub fn uniform(n: usize, basis: Pauli) -> Result<Self> {
        Self::new(vec![basis; n])
    }

    pub fn n_qubits(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Pauli] {
        &self.bases
    }

    pub fn basis(&self, site: usize) -> Pauli {
        self.bases[site]
    }

    pub fn resolved_terms(&self) -> &[TermRef] {
        &self.resolves
    }

    pub fn letter_string(&self) -> String {
        self.bases.iter().map(|p| p.as_char()).collect()
    }

    /// True iff every non-identity letter of `s` matches the basis at its site.
    pub fn resolves<T: Scalar>(&self, s: &PauliString<T>) -> bool {
        s.n_qubits() == self.bases.len()
            && (0..self.bases.len()).all(|k| {
                let l = s.letter(k);
                l == Pauli::I || l == self.bases[k]
            })
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letter_string())
    }
}

/// Settings for the periodic construction: end sites carry `end`, gate pairs of
/// the second layer alternate between two choices from `choices`.
fn periodic_family(n: usize, end: Pauli, choices: &[(Pauli, Pauli); 3]) -> Vec<Vec<Pauli>> {
    let pairs = second_layer_pairs(n);
    let mut out: Vec<Vec<Pauli>> = Vec::new();
    for a in choices {
        for b in choices {
            let mut bases = vec![end; n];
            for (g, &(i, j)) in pairs.iter().enumerate() {
                let (p, q) = if g % 2 == 0 { *a } else { *b };
                bases[i] = p;
                bases[j] = q;
            }
            if !out.contains(&bases) {
                out.push(bases);
            }
        }
    }
    out
}

fn periodic_candidates(n: usize) -> Vec<Vec<Pauli>> {
    use Pauli::{X, Y, Z};
    if n < 4 || n % 2 == 1 {
        return Vec::new();
    }
    let mut c = periodic_family(n, X, &[(X, X), (Y, Z), (Z, Y)]);
    c.extend(periodic_family(n, Z, &[(Z, Z), (Y, X), (X, Y)]));
    c
}

fn covers(bases: &[Pauli], letters: &[Pauli]) -> bool {
    bases.iter().zip(letters).all(|(b, l)| *l == Pauli::I || l == b)
}

/// Greedy candidate seeded by one uncovered term: absorb every later
/// compatible uncovered term, then fill remaining sites with `Z`.
fn greedy_candidate(seed: usize, uncovered: &[Vec<Pauli>]) -> Vec<Pauli> {
    let n = uncovered[seed].len();
    let mut partial: Vec<Pauli> = uncovered[seed].clone();
    for other in uncovered.iter().skip(seed + 1) {
        let compatible =
            partial.iter().zip(other).all(|(p, o)| *p == Pauli::I || *o == Pauli::I || p == o);
        if compatible {
            for k in 0..n {
                if partial[k] == Pauli::I {
                    partial[k] = other[k];
                }
            }
        }
    }
    partial.into_iter().map(|p| if p == Pauli::I { Pauli::Z } else { p }).collect()
}

/// Cover every term of every sum with local measurement settings.
///
/// The periodic two-family construction is tried first and a candidate is kept
/// only if it resolves a term not yet covered. Anything left is handled by a
/// greedy pass that picks the candidate covering the most uncovered terms, ties
/// going to the lexicographically smallest setting.
pub fn group_into_lms<T: Scalar>(sums: &[PauliSum<T>], n: usize) -> Result<Vec<MeasurementSetting>> {
    for s in sums {
        if s.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s.n_qubits() });
        }
    }
    let distinct: BTreeSet<Vec<Pauli>> = sums
        .iter()
        .flat_map(|s| s.terms().iter().filter(|t| !t.is_identity()).map(PauliString::letters))
        .collect();
    let mut uncovered: Vec<Vec<Pauli>> = distinct.into_iter().collect();
    let mut chosen: Vec<Vec<Pauli>> = Vec::new();

    for cand in periodic_candidates(n) {
        let before = uncovered.len();
        uncovered.retain(|t| !covers(&cand, t));
        if uncovered.len() < before {
            chosen.push(cand);
        }
    }
    while !uncovered.is_empty() {
        let best = (0..uncovered.len())
            .map(|seed| {
                let cand = greedy_candidate(seed, &uncovered);
                let hits = uncovered.iter().filter(|t| covers(&cand, t)).count();
                (hits, cand)
            })
            .max_by(|(ha, ca), (hb, cb)| ha.cmp(hb).then_with(|| cb.cmp(ca)))
            .map(|(_, c)| c)
            .expect("uncovered is non-empty");
        uncovered.retain(|t| !covers(&best, t));
        chosen.push(best);
    }

    Ok(chosen
        .into_iter()
        .map(|bases| {
            let resolves = sums
                .iter()
                .enumerate()
                .flat_map(|(si, s)| {
                    s.terms().iter().enumerate().map(move |(ti, t)| (si, ti, t))
                })
                .filter(|(_, _, t)| covers(&bases, &t.letters()))
                .map(|(sum, term, _)| TermRef { sum, term })
                .collect();
            MeasurementSetting { bases, resolves }
        })
        .collect())
}

/// Measured data for one setting.
#[derive(Debug, Clone, PartialEq)]
pub enum SettingData<T> {
    /// Raw outcome bitstrings, site `s` at bit `n - 1 - s`.
    Shots(Vec<u64>),
    /// Exact outcome distribution over all `2^n` bitstrings (infinite shots).
    Distribution(Vec<T>),
}

/// Estimate `<sum>` from grouped data.
///
/// Each term is assigned to the first setting that resolves it. Within a
/// setting all assigned terms are combined shot by shot before averaging, so
/// their covariance enters the standard error; settings are independent.
pub fn estimate_sum<T: Scalar>(data: &[(MeasurementSetting, SettingData<T>)], sum: &PauliSum<T>) -> Result<(T, T)> {
    let mut assigned: Vec<Vec<&PauliString<T>>> = vec![Vec::new(); data.len()];
    let mut constant = T::zero();
    for t in sum.terms() {
        if t.is_identity() {
            constant += t.weight();
            continue;
        }
        let k = data
            .iter()
            .position(|(s, _)| s.resolves(t))
            .ok_or_else(|| Error::Unresolvable(t.letter_string()))?;
        assigned[k].push(t);
    }
    let mut value = constant;
    let mut var = T::zero();
    for ((_, d), terms) in data.iter().zip(&assigned) {
        if terms.is_empty() {
            continue;
        }
        let combined = |outcome: u64| -> T {
            terms.iter().map(|t| t.weight() * T::of(f64::from(t.outcome_parity(outcome)))).sum()
        };
        match d {
            SettingData::Shots(shots) => {
                if shots.is_empty() {
                    return Err(Error::Numerical("setting has no shots".into()));
                }
                let m = T::of_usize(shots.len());
                let vals: Vec<T> = shots.iter().map(|&o| combined(o)).collect();
                let mean = vals.iter().copied().sum::<T>() / m;
                value += mean;
                if shots.len() > 1 {
                    let ss: T = vals.iter().map(|v| (*v - mean) * (*v - mean)).sum();
                    var += ss / (m - T::one()) / m;
                }
            }
            SettingData::Distribution(p) => {
                value += p.iter().enumerate().map(|(b, &pb)| pb * combined(b as u64)).sum::<T>();
            }
        }
    }
    Ok((value, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::conjugate::conjugated_stabilizers;

    #[test]
    fn ten_sites_need_eighteen_settings() {
        let sums = conjugated_stabilizers::<f64>(10).unwrap();
        let settings = group_into_lms(&sums, 10).unwrap();
        assert_eq!(settings.len(), 18);
        assert_eq!(settings.iter().filter(|s| s.basis(0) == Pauli::X).count(), 9);
        for (si, s) in sums.iter().enumerate() {
            for (ti, t) in s.terms().iter().enumerate() {
                let hit = settings.iter().any(|m| m.resolves(t));
                assert!(hit, "term {t} uncovered");
                assert!(settings.iter().any(|m| m.resolved_terms().contains(&TermRef { sum: si, term: ti })));
            }
        }
    }

    #[test]
    fn all_z_needs_one_setting() {
        let z = PauliSum::from_string(PauliString::<f64>::homogeneous(6, &[0, 1, 2, 3, 4, 5], Pauli::Z).unwrap());
        let s = group_into_lms(&[z], 6).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].letter_string(), "ZZZZZZ");
    }

    #[test]
    fn greedy_fallback_covers_odd_register() {
        let terms = ["XYI", "IYZ", "ZII", "YXX"];
        let sum = PauliSum::new(
            3,
            terms.iter().map(|l| PauliString::<f64>::from_letters(l, 1.0).unwrap()).collect(),
        )
        .unwrap();
        let s = group_into_lms(&[sum.clone()], 3).unwrap();
        assert!(sum.terms().iter().all(|t| s.iter().any(|m| m.resolves(t))));
        // XYZ covers the first two and nothing else does better
        assert_eq!(s[0].letter_string(), "XYZ");
    }

    #[test]
    fn unresolvable_term_reported() {
        let set = MeasurementSetting::from_letters("ZZ").unwrap();
        let sum = PauliSum::from_string(PauliString::<f64>::from_letters("XZ", 1.0).unwrap());
        let err = estimate_sum(&[(set, SettingData::Distribution(vec![0.25; 4]))], &sum).unwrap_err();
        assert_eq!(err, Error::Unresolvable("XZ".into()));
    }

    #[test]
    fn deterministic_shots_have_zero_stderr() {
        let set = MeasurementSetting::from_letters("ZZ").unwrap();
        let sum = PauliSum::new(
            2,
            vec![
                PauliString::<f64>::from_letters("ZZ", -1.0).unwrap(),
                PauliString::from_letters("ZI", 0.5).unwrap(),
            ],
        )
        .unwrap();
        // |10>: ZZ = -1, ZI = -1
        let (v, e) = estimate_sum(&[(set, SettingData::Shots(vec![0b10; 50]))], &sum).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(e, 0.0);
    }

    #[test]
    fn setting_json_uses_letters() {
        let s = MeasurementSetting::from_letters("XYZ").unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"XYZ\""));
        let back: MeasurementSetting = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(MeasurementSetting::from_letters("XIZ").is_err());
    }
}
