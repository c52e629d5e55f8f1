use alloc::string::String;
use core::fmt;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two objects that must agree on a size did not.
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    /// An enumeration would exceed the configured budget.
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },
    /// A basis or generator that must be full rank was not.
    RankDeficient { expected: usize, found: usize },
    /// A parameter is outside the supported range.
    InvalidParameter(String),
    /// A width schedule reached zero or otherwise does not fit.
    WidthSchedule { stage: String, detail: String },
    /// A search ran out of attempts.
    SearchExhausted { tries: u64 },
    /// A branching program is not well formed.
    MalformedProgram(String),
    /// A certification step failed.
    Uncertified(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { what, expected, found } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, found {found}")
            }
            Error::BudgetExceeded { what, needed, budget } => {
                write!(f, "{what} needs {needed} evaluations, budget is {budget}")
            }
            Error::RankDeficient { expected, found } => {
                write!(f, "expected rank {expected}, found {found}")
            }
            Error::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            Error::WidthSchedule { stage, detail } => {
                write!(f, "width schedule fails at {stage}: {detail}")
            }
            Error::SearchExhausted { tries } => write!(f, "search exhausted after {tries} tries"),
            Error::MalformedProgram(s) => write!(f, "malformed program: {s}"),
            Error::Uncertified(s) => write!(f, "not certified: {s}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}

pub(crate) fn ensure_budget(what: &'static str, needed: u128, budget: u128) -> Result<()> {
    if needed <= budget {
        Ok(())
    } else {
        Err(Error::BudgetExceeded { what, needed, budget })
    }
}
