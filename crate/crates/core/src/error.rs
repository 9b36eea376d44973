use alloc::string::String;
use core::fmt;

/// Errors shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside its mathematical domain (e.g. a probability
    /// outside `[0, 1]`).
    Domain(&'static str),
    /// A truncation would leave a distribution with no probability mass.
    DegenerateSupport(&'static str),
    /// A set of CDF pieces does not form a valid distribution.
    InvalidDistribution(String),
    /// Caller-supplied data violates a documented precondition.
    Precondition(&'static str),
    /// Malformed input that is not a numeric issue (e.g. a degenerate menu).
    InvalidInput(String),
    /// An iterative solver failed to converge; carries the last bracket.
    Numeric {
        what: &'static str,
        lo: f64,
        hi: f64,
    },
    /// A quantity the theory guarantees failed to hold numerically.
    InvariantViolation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::DegenerateSupport(what) => write!(f, "degenerate support: {what}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::Precondition(what) => write!(f, "precondition violated: {what}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Numeric { what, lo, hi } => {
                write!(f, "numeric failure: {what} (bracket [{lo}, {hi}])")
            }
            Error::InvariantViolation(what) => write!(f, "invariant violation: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
