use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("f({x}) = {value} lies outside (0, 1]")]
    RangeViolation { x: f64, value: f64 },

    #[error("f(x) - x vanishes on an interval ({percent:.1}% of grid points); fixed points are not isolated")]
    NonIsolatedFixedPoints { percent: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("horizon {requested} exceeds the limit {limit}")]
    HorizonTooLarge { requested: usize, limit: usize },

    #[error("order precondition violated: {0}")]
    PreconditionOrder(String),

    #[error("2*alpha*l - l = {value} is not a nonnegative integer")]
    IntegralityViolation { value: f64 },

    #[error("f is not symmetric about 1/2: f({x}) = {left} but f({mirror}) = {right}")]
    SymmetryViolation {
        x: f64,
        mirror: f64,
        left: f64,
        right: f64,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("f is not the identity map")]
    NotLinear,

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Precondition,
    Budget,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. } | Error::Config { .. } => ErrorKind::Usage,
            Error::BudgetExhausted(_) | Error::HorizonTooLarge { .. } => ErrorKind::Budget,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Precondition,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::RangeViolation { .. } => "RangeViolation",
            Error::NonIsolatedFixedPoints { .. } => "NonIsolatedFixedPoints",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::HorizonTooLarge { .. } => "HorizonTooLarge",
            Error::PreconditionOrder(_) => "PreconditionOrder",
            Error::IntegralityViolation { .. } => "IntegralityViolation",
            Error::SymmetryViolation { .. } => "SymmetryViolation",
            Error::UnsupportedRegime(_) => "UnsupportedRegime",
            Error::NotLinear => "NotLinear",
            Error::HypothesisUnmet(_) => "HypothesisUnmet",
            Error::BudgetExhausted(_) => "BudgetExhausted",
            Error::Config { .. } => "ConfigError",
            Error::Io(_) => "IoError",
        }
    }
}
