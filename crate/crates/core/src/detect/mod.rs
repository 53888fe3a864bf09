//! Entanglement detection: fidelity witness with the stabilizer bound,
//! homogeneous-correlation certification, and reverse-evolution fidelities.

mod fidelity;
mod homogeneous;
mod reverse;
mod symmetry;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use fidelity::{
    fidelity_lower_bound, fidelity_verdict, fidelity_witness, gme_witness, stabilizer_expectations,
    white_noise_threshold, GME_FIDELITY,
};
pub use homogeneous::{
    certification_schedule, certify_full_entanglement, homogeneous_value, run_certification, Certification,
    CertificationStep, HomogeneousValue,
};
pub use reverse::{reverse_fidelity_series, reverse_report, Checkpoint, CheckpointLabel, GateNoise, ReverseSeries};
pub use symmetry::{rotated_expectation, twirl, twirl_exact};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fidelity,
    Homogeneous,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Gme,
    FullyEntangled,
    /// Evidence equals the threshold within tolerance.
    Boundary,
    /// Estimated fidelity above the bound without a rigorous certificate.
    IndicativeGme,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEntry {
    pub label: String,
    pub value: f64,
    pub stderr: f64,
}

impl ExpectationEntry {
    pub fn new(label: impl Into<String>, value: f64, stderr: f64) -> Self {
        Self { label: label.into(), value, stderr }
    }
}

/// Outcome of one detection pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub method: Method,
    pub n: usize,
    pub expectations: Vec<ExpectationEntry>,
    pub derived: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub trace: Vec<serde_json::Value>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
}
