use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::detect::{ExpectationEntry, Method, Verdict, WitnessReport};
use crate::error::{Error, Result};
use crate::estimator::{acquire, Acquisition};
use crate::pauli::{estimate_sum, MeasurementSetting, Pauli, PauliString, PauliSum, SettingData};
use crate::protocol::check_even;
use crate::qstate::QuantumState;
use crate::scalar::Scalar;

/// Signed homogeneous correlations on a subset and `gamma = |x| + |y| + |z|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousValue<T> {
    pub subset: Vec<usize>,
    pub x: T,
    pub y: T,
    pub z: T,
    pub gamma: T,
}

impl<T: Scalar> HomogeneousValue<T> {
    pub fn from_parts(subset: Vec<usize>, x: T, y: T, z: T) -> Self {
        Self { subset, x, y, z, gamma: x.abs() + y.abs() + z.abs() }
    }
}

fn check_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x >= n) {
        return Err(Error::SiteOutOfRange { site: bad, n });
    }
    if s.len() % 2 == 1 {
        return Err(Error::OddSubset(s.len()));
    }
    Ok(s)
}

/// `gamma` on the reduced state of `subset`. Values above one exclude every
/// odd-odd split of the subset.
pub fn homogeneous_value<T: Scalar, S: QuantumState<T>>(state: &S, subset: &[usize]) -> Result<HomogeneousValue<T>> {
    let n = state.n_qubits();
    let s = check_subset(n, subset)?;
    let ev = |p| -> Result<T> { state.expectation(&PauliString::homogeneous(n, &s, p)?) };
    Ok(HomogeneousValue::from_parts(s.clone(), ev(Pauli::X)?, ev(Pauli::Y)?, ev(Pauli::Z)?))
}

/// Subsets checked in order: at level `m` the left sets `{0..m-1}` and
/// `{0..m-2, m}`, then their mirror images, for `m = 2, 4, ..., n-2`.
pub fn certification_schedule(n: usize) -> Result<Vec<Vec<usize>>> {
    check_even(n, 4)?;
    let mirror = |v: &[usize]| -> Vec<usize> {
        let mut m: Vec<usize> = v.iter().map(|&s| n - 1 - s).collect();
        m.sort_unstable();
        m
    };
    let mut out: Vec<Vec<usize>> = Vec::new();
    for m in (2..n).step_by(2) {
        let first: Vec<usize> = (0..m).collect();
        let mut second: Vec<usize> = (0..m - 1).collect();
        second.push(m);
        for cand in [first.clone(), second.clone(), mirror(&first), mirror(&second)] {
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationStep {
    pub subset: Vec<usize>,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub gamma: f64,
    pub passed: bool,
    /// Groups forced onto the same side by this check.
    pub merged: Option<(Vec<usize>, Vec<usize>)>,
    pub groups_after: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub n: usize,
    pub steps: Vec<CertificationStep>,
    pub closed: bool,
    pub groups: Vec<Vec<usize>>,
}

/// Union-find over sites, kept as explicit sorted groups.
struct Groups {
    owner: Vec<usize>,
}

impl Groups {
    fn new(n: usize) -> Self {
        Self { owner: (0..n).collect() }
    }

    fn find(&self, mut s: usize) -> usize {
        while self.owner[s] != s {
            s = self.owner[s];
        }
        s
    }

    fn members(&self, root: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&s| self.find(s) == root).collect()
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.owner[hi] = lo;
    }

    fn all(&self) -> Vec<Vec<usize>> {
        let mut roots: Vec<usize> = (0..self.owner.len()).map(|s| self.find(s)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.into_iter().map(|r| self.members(r)).collect()
    }
}

/// Walk the schedule and merge groups of sites that no bipartition may split.
///
/// Sites in one group lie on the same side of any bipartition the state could
/// be separable across. A passing check whose subset meets exactly two groups,
/// each in an odd number of sites, merges them: splitting them would make the
/// subset's cut odd-odd. One remaining group leaves no admissible bipartition.
pub fn run_certification<T: Scalar>(
    n: usize,
    mut value: impl FnMut(&[usize]) -> Result<HomogeneousValue<T>>,
) -> Result<Certification> {
    let mut groups = Groups::new(n);
    let mut steps = Vec::new();
    for subset in certification_schedule(n)? {
        let v = value(&subset)?;
        let passed = v.gamma > T::one() + T::value_tol();
        let mut merged = None;
        if passed {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &s in &subset {
                *counts.entry(groups.find(s)).or_default() += 1;
            }
            let roots: Vec<(usize, usize)> = counts.into_iter().collect();
            if roots.len() == 2 && roots.iter().all(|(_, c)| c % 2 == 1) {
                let (a, b) = (roots[0].0, roots[1].0);
                merged = Some((groups.members(a), groups.members(b)));
                groups.union(a, b);
            }
        }
        steps.push(CertificationStep {
            subset,
            x: v.x.to_f64_lossy(),
            y: v.y.to_f64_lossy(),
            z: v.z.to_f64_lossy(),
            gamma: v.gamma.to_f64_lossy(),
            passed,
            merged,
            groups_after: groups.all(),
        });
        if groups.all().len() == 1 {
            break;
        }
    }
    let all = groups.all();
    Ok(Certification { n, steps, closed: all.len() == 1, groups: all })
}

fn homogeneous_settings(n: usize) -> Result<Vec<MeasurementSetting>> {
    [Pauli::X, Pauli::Y, Pauli::Z].into_iter().map(|p| MeasurementSetting::uniform(n, p)).collect()
}

fn value_from_data<T: Scalar>(
    data: &[(MeasurementSetting, SettingData<T>)],
    n: usize,
    subset: &[usize],
) -> Result<(HomogeneousValue<T>, [T; 3])> {
    let s = check_subset(n, subset)?;
    let mut vals = [T::zero(); 3];
    let mut errs = [T::zero(); 3];
    for (k, p) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
        let sum = PauliSum::from_string(PauliString::homogeneous(n, &s, p)?);
        let (v, e) = estimate_sum(data, &sum)?;
        vals[k] = v;
        errs[k] = e;
    }
    Ok((HomogeneousValue::from_parts(s, vals[0], vals[1], vals[2]), errs))
}

/// Homogeneous-correlation pipeline: acquire the three uniform settings,
/// run the certification walk and report the whole-register value too.
pub fn certify_full_entanglement<T: Scalar, S: QuantumState<T> + Sync>(
    state: &S,
    acq: &Acquisition<T>,
) -> Result<WitnessReport> {
    let n = state.n_qubits();
    let settings = homogeneous_settings(n)?;
    let data = acquire(state, &settings, acq)?;
    let mut expectations = Vec::new();
    let cert = run_certification(n, |subset| {
        let (v, e) = value_from_data(&data, n, subset)?;
        let tag = subset.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        for (name, val, err) in [("X", v.x, e[0]), ("Y", v.y, e[1]), ("Z", v.z, e[2])] {
            expectations.push(ExpectationEntry::new(format!("{name}[{tag}]"), val.to_f64_lossy(), err.to_f64_lossy()));
        }
        Ok(v)
    })?;
    let all: Vec<usize> = (0..n).collect();
    let (whole, whole_err) = value_from_data(&data, n, &all)?;

    let mut derived = BTreeMap::new();
    derived.insert("gamma_whole".to_string(), whole.gamma.to_f64_lossy());
    derived.insert(
        "gamma_whole_stderr".to_string(),
        whole_err.iter().map(|e| e.to_f64_lossy().powi(2)).sum::<f64>().sqrt(),
    );
    derived.insert("checks".to_string(), cert.steps.len() as f64);
    derived.insert("checks_passed".to_string(), cert.steps.iter().filter(|s| s.passed).count() as f64);
    derived.insert("settings".to_string(), settings.len() as f64);
    derived.insert("p_ms".to_string(), acq.p_ms.to_f64_lossy());
    for step in &cert.steps {
        let tag = step.subset.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        derived.insert(format!("gamma[{tag}]"), step.gamma);
    }
    let trace = cert.steps.iter().map(|s| serde_json::to_value(s).expect("step serializes")).collect();
    Ok(WitnessReport {
        method: Method::Homogeneous,
        n,
        expectations,
        derived,
        verdict: if cert.closed { Verdict::FullyEntangled } else { Verdict::Inconclusive },
        trace,
        seed: acq.shots.map(|_| acq.seed),
        shots: acq.shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::target_state;
    use crate::qstate::{MixedState, PureState};

    #[test]
    fn product_pair_gives_one() {
        let s = PureState::<f64>::from_bits(&[0, 1]).unwrap();
        let v = homogeneous_value(&s, &[0, 1]).unwrap();
        assert!((v.gamma - 1.0).abs() < 1e-15);
        assert_eq!(homogeneous_value(&s, &[0]).unwrap_err(), Error::OddSubset(1));
    }

    #[test]
    fn rdm_route_agrees() {
        let t = target_state::<f64>(8).unwrap();
        let sub = [1, 2, 4, 5];
        let v = homogeneous_value(&t, &sub).unwrap();
        let rdm = t.reduced_density_matrix(&sub).unwrap();
        let w = homogeneous_value(&rdm, &[0, 1, 2, 3]).unwrap();
        assert!((v.gamma - w.gamma).abs() < 1e-12);
        assert!((v.x - w.x).abs() < 1e-12 && (v.z - w.z).abs() < 1e-12);
    }

    #[test]
    fn schedule_for_ten() {
        let s = certification_schedule(10).unwrap();
        assert_eq!(&s[..4], &[vec![0, 1], vec![0, 2], vec![8, 9], vec![7, 9]]);
        assert_eq!(s[4], vec![0, 1, 2, 3]);
        assert_eq!(s[5], vec![0, 1, 2, 4]);
        assert_eq!(s[8], vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn certification_closes_on_targets() {
        for (n, checks) in [(6usize, 5usize), (8, 7), (10, 9)] {
            let t = target_state::<f64>(n).unwrap();
            let c = run_certification(n, |s| homogeneous_value(&t, s)).unwrap();
            assert!(c.closed, "n = {n}: {:?}", c.groups);
            assert_eq!(c.steps.len(), checks, "n = {n}");
        }
    }

    #[test]
    fn maximally_mixed_is_inconclusive() {
        let m = MixedState::<f64>::maximally_mixed(6).unwrap();
        let r = certify_full_entanglement(&m, &Acquisition::exact()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.derived["gamma_whole"].abs() < 1e-12);
    }

    #[test]
    fn pipeline_on_ten_site_target() {
        let t = target_state::<f64>(10).unwrap();
        let r = certify_full_entanglement(&t, &Acquisition::exact()).unwrap();
        assert_eq!(r.verdict, Verdict::FullyEntangled);
        assert!((r.derived["gamma_whole"] - 3.0).abs() < 1e-9);
        assert!((r.derived["gamma[0,1]"] - 1.5).abs() < 1e-9);
    }
}
