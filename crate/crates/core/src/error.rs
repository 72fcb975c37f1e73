use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("series did not converge within {ceiling} terms")]
    Nonconvergence { ceiling: u64 },
    #[error("series has a pole: Lambda + 1 + {index} = 0")]
    PoleInput { index: u64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("phase undefined: pair moment vanishes")]
    UndefinedPhase,
    #[error("oracle requires delta3 = 0, got {delta3}")]
    UnsupportedDetuning { delta3: f64 },
    #[error("steady-state solver failed after {iterations} iterations (residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },
    #[error("cutoff {cutoff} insufficient: tail mass {tail_mass:e}")]
    CutoffInsufficient { cutoff: usize, tail_mass: f64 },
    #[error("accuracy guard: {0}")]
    AccuracyGuard(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::Nonconvergence { .. } => "Nonconvergence",
            Error::PoleInput { .. } => "PoleInput",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::Domain(_) => "DomainError",
            Error::UndefinedPhase => "UndefinedPhase",
            Error::UnsupportedDetuning { .. } => "UnsupportedDetuning",
            Error::SolverFailure { .. } => "SolverFailure",
            Error::CutoffInsufficient { .. } => "CutoffInsufficient",
            Error::AccuracyGuard(_) => "AccuracyGuard",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
