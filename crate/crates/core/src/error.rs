use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^†| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },
    #[error("spectrum has no levels")]
    EmptySpectrum,
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid state vector: {0}")]
    InvalidState(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("level index {index} out of range for {levels} levels")]
    IndexOutOfRange { index: usize, levels: usize },
    #[error("branch {level} has probability {probability:e}; cannot project onto it")]
    ZeroProbabilityBranch { level: usize, probability: f64 },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid Lévy measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("argument {alpha} lies outside the exponent domain {domain}")]
    OutsideExponentDomain { alpha: f64, domain: String },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("time step must be positive, got {0}")]
    NonpositiveTimestep(f64),
    #[error("martingale parameter kappa must be nonzero")]
    ZeroKappa,
    #[error("bad time grid: {0}")]
    BadGrid(String),
    #[error("operation requires Brownian noise")]
    WrongNoiseKind,
    #[error("every branch has zero prior probability")]
    AllWeightsZeroProbability,
    #[error("branch weights vanish even in log space")]
    DegenerateNormalization,
    #[error("integration step {step} unstable: {detail}")]
    StepUnstable { step: usize, detail: String },
    #[error("{0} must be positive")]
    NonpositiveInput(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
