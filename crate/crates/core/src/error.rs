use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the input (lengths, divisibility, ranges) does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested construction is outside the cases where the result is guaranteed.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// The filter bank does not have the structure required by the operation.
    #[error("bank is not a tight frame: {0}")]
    NotTight(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),

    /// A numerical post-condition check failed.
    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Hypothesis(_) | Error::NotTight(_) | Error::Parse(_) => 2,
            Error::Infeasible
            | Error::Unbounded
            | Error::IterationLimit(_)
            | Error::Numerical(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
