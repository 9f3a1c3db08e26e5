use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    Scale(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("invariant broken: {0}")]
    InvariantBroken(String),

    #[error("hierarchy level count {levels} exceeds bound {bound}; decomposition broke the halving contract")]
    HalvingViolation { levels: usize, bound: usize },

    #[error("demand pair ({src}, {dst}) is not routable")]
    RoutingInfeasible { src: usize, dst: usize },

    #[error("color {color} does not reach vertex {vertex} from the root")]
    ColorNotSpanning { color: usize, vertex: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error stems from bad input rather than a failed operation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedInput(_) | Error::Parse { .. } | Error::Parameter(_) | Error::Io(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "malformed_input",
            Error::Parse { .. } => "parse",
            Error::Parameter(_) => "parameter",
            Error::Scale(_) => "scale",
            Error::Unsupported(_) => "unsupported",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::InvariantBroken(_) => "invariant_broken",
            Error::HalvingViolation { .. } => "halving_violation",
            Error::RoutingInfeasible { .. } => "routing_infeasible",
            Error::ColorNotSpanning { .. } => "color_not_spanning",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
