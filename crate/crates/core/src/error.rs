use crate::solver::SolveReport;

/// Errors raised by operators, penalties and solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),

    #[error("non-finite value encountered at iteration {iteration}: {what}")]
    NonFinite {
        iteration: usize,
        what: String,
        report: Box<SolveReport>,
    },

    #[error("solver stagnated at iteration {iteration}: {reason}")]
    Stagnation {
        iteration: usize,
        reason: String,
        report: Box<SolveReport>,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Wraps the error with additional context, keeping the original as source.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Returns the innermost error, looking through context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True if the root cause is a stagnation of the line search.
    pub fn is_stagnation(&self) -> bool {
        matches!(self.root(), Error::Stagnation { .. })
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
