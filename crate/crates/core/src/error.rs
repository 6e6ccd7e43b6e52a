use thiserror::Error;

/// Errors raised by the simulator, metrology and protocol layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register of {0} qubits exceeds the supported maximum of {max}", max = crate::statevec::MAX_QUBITS)]
    DimensionOverflow(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("amplitude vector of length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not a projector (max deviation {0:e})")]
    NotProjector(f64),

    #[error("invalid target qubits: {0}")]
    InvalidTargets(String),

    #[error("degenerate postselection (probability {0:e} below threshold)")]
    DegeneratePostselection(f64),

    #[error("accepted branches {branches} are degenerate (success probability {probability:e})")]
    DegenerateBranches { branches: String, probability: f64 },

    #[error("pre- and postselected states are orthogonal (|<f|i>| = {0:e})")]
    OrthogonalPrePost(f64),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("Fisher information must be positive, got {0}")]
    NonPositiveFisher(f64),

    #[error("invalid protocol configuration: {0}")]
    InvalidConfig(String),

    #[error("likelihood is flat on the search interval; parameter not identifiable")]
    NonIdentifiable,

    #[error("protocol has no accepted branch with nonzero probability")]
    NoAcceptedBranch,

    #[error("invalid value for `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that mark a vanishing postselection branch rather than bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegeneratePostselection(_)
                | Error::DegenerateBranches { .. }
                | Error::OrthogonalPrePost(_)
                | Error::NoAcceptedBranch
        )
    }
}
