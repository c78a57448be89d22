use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("deformation length l must be >= 0, got {0}")]
    NegativeL(f64),
    #[error("angular frequency omega must be > 0, got {0}")]
    NonPositiveOmega(f64),
    #[error("mass must be > 0, got {0}")]
    NonPositiveMass(f64),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),

    #[error("l*omega = {l_omega} >= 1: cutoff regime, the closed-form trajectory does not exist")]
    CutoffRegime { l_omega: f64 },
    #[error("time step {dt} exceeds the resolution limit {limit} (period / 20)")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("invalid integration window: {0}")]
    InvalidWindow(String),
    #[error("trajectory does not contain {needed}: {found}")]
    IncompleteOrbit { needed: String, found: String },
    #[error("samples are not uniformly spaced (row {row})")]
    NonUniformSampling { row: usize },

    #[error("truncation dimension {dim} is below the minimum {min}")]
    DimTooSmall { dim: usize, min: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("requested {requested} eigenvalues from a problem of size {size}")]
    TooManyEigenvalues { requested: usize, size: usize },

    #[error("grid needs an odd point count >= 101, got {points}")]
    GridTooCoarse { points: usize },
    #[error("rho_max = {rho_max} leaves tanh(l*rho_max) = {saturation} below 1 - 1e-10")]
    DomainTooSmall { rho_max: f64, saturation: f64 },
    #[error("invalid resolution ladder: {0}")]
    InvalidLadder(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by malformed inputs rather than by a computation
    /// that was attempted and failed.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::NegativeL(_)
                | Error::NonPositiveOmega(_)
                | Error::NonPositiveMass(_)
                | Error::NonFinite(_)
                | Error::GridTooCoarse { .. }
                | Error::DomainTooSmall { .. }
                | Error::InvalidLadder(_)
                | Error::DimTooSmall { .. }
                | Error::InvalidWindow(_)
                | Error::TooManyEigenvalues { .. }
        )
    }

    /// Variant name, used as a stable tag in tabular output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeL(_) => "NegativeL",
            Error::NonPositiveOmega(_) => "NonPositiveOmega",
            Error::NonPositiveMass(_) => "NonPositiveMass",
            Error::NonFinite(_) => "NonFinite",
            Error::CutoffRegime { .. } => "CutoffRegime",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::InvalidWindow(_) => "InvalidWindow",
            Error::IncompleteOrbit { .. } => "IncompleteOrbit",
            Error::NonUniformSampling { .. } => "NonUniformSampling",
            Error::DimTooSmall { .. } => "DimTooSmall",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::TooManyEigenvalues { .. } => "TooManyEigenvalues",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::DomainTooSmall { .. } => "DomainTooSmall",
            Error::InvalidLadder(_) => "InvalidLadder",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
