use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// The CLI maps [`Error::ResourceCap`] to exit code 3 and everything else to
/// exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("schema error{}: {message}", term.map(|t| format!(" in term {t}")).unwrap_or_default())]
    Schema {
        term: Option<usize>,
        message: String,
    },

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("polynomial is not multilinear")]
    NotMultilinear,

    #[error("polynomial is not homogeneous (degrees {0:?})")]
    NotHomogeneous(Vec<usize>),

    #[error("distribution `{0}` has no finite bound L; use the Gaussian recursion instead")]
    UnboundedDistribution(String),

    #[error("resource cap exceeded: {what} requires {required}, cap is {cap}")]
    ResourceCap {
        what: String,
        required: usize,
        cap: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(term: Option<usize>, message: impl Into<String>) -> Self {
        Error::Schema {
            term,
            message: message.into(),
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::Parameter(message.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
