use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function (e.g. `t <= 0`).
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Structurally invalid argument (index out of range, bad precision, ...).
    #[error("invalid argument to {op}: {msg}")]
    Argument { op: &'static str, msg: String },

    /// Valid mathematics that this library deliberately does not cover.
    #[error("unsupported in {op}: {msg}")]
    Unsupported { op: &'static str, msg: String },

    /// A numeric target could not be met (series did not settle, node budget exhausted).
    #[error("numeric failure in {op}: {msg}")]
    NumericFailure { op: &'static str, msg: String },

    /// Degree search bracket is invalid on the scanned grid and orders.
    #[error("bracket error: {0}")]
    Bracket(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn argument(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Argument { op, msg: msg.into() }
    }

    pub(crate) fn unsupported(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Unsupported { op, msg: msg.into() }
    }

    pub(crate) fn numeric(op: &'static str, msg: impl Into<String>) -> Self {
        Error::NumericFailure { op, msg: msg.into() }
    }

    /// True for failures caused by unmet numeric targets rather than bad input.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, Error::NumericFailure { .. })
    }
}
