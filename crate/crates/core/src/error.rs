use thiserror::Error;

/// Errors raised by state construction, protocol building and the detection pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("even N required, got {0}")]
    OddQubitCount(usize),

    #[error("at least {min} qubits required, got {n}")]
    TooFewQubits { n: usize, min: usize },

    #[error("register of {0} qubits exceeds the supported size")]
    RegisterTooLarge(usize),

    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("gate sites must differ, got ({0}, {0})")]
    EqualSites(usize),

    #[error("gate placements overlap on site {0}")]
    OverlappingGates(usize),

    #[error("subset must be non-empty")]
    EmptySubset,

    #[error("bipartition must leave both parts non-empty")]
    TrivialBipartition,

    #[error("subset of size {0} is odd, an even number of sites is required")]
    OddSubset(usize),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{name} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("expectation value {0} is outside [-1, 1]")]
    ExpectationOutOfRange(f64),

    #[error("Pauli term {0} is not resolvable by any provided measurement setting")]
    Unresolvable(String),

    #[error("unknown sweep parameter '{0}'")]
    UnknownParameter(String),

    #[error("Fock basis dimension {dim} exceeds cap {cap}")]
    BasisTooLarge { dim: usize, cap: usize },

    #[error("inconsistent Fock basis: {0}")]
    InconsistentBasis(String),

    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical invariant violated: {0}")]
    Numerical(String),
}

pub type Result<V> = std::result::Result<V, Error>;
