//! Simulation and verification of superexchange-gate entangled states on
//! one-dimensional qubit chains.

pub mod detect;
pub mod error;
pub mod estimator;
pub mod hubbard;
pub mod linalg;
pub mod noise;
pub mod pauli;
pub mod protocol;
pub mod qstate;
pub mod scalar;

pub use error::{Error, Result};

/// Library version embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::Scalar;

/// Double-precision instantiations used by the CLI and the acceptance suite.
pub type PureState = qstate::PureState<f64>;
pub type MixedState = qstate::MixedState<f64>;
pub type PauliString = pauli::PauliString<f64>;
pub type PauliSum = pauli::PauliSum<f64>;
pub type NoiseParams = noise::NoiseParams<f64>;
pub type HubbardParams = hubbard::HubbardParams<f64>;

/// Single-precision instantiations.
pub mod single {
    use crate::{hubbard, noise, pauli, qstate};

    pub type PureState = qstate::PureState<f32>;
    pub type MixedState = qstate::MixedState<f32>;
    pub type PauliString = pauli::PauliString<f32>;
    pub type PauliSum = pauli::PauliSum<f32>;
    pub type NoiseParams = noise::NoiseParams<f32>;
    pub type HubbardParams = hubbard::HubbardParams<f32>;
}
