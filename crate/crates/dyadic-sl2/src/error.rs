use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// The CLI maps [`Error::Verification`] to exit code 1 and every other
/// variant to exit code 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("precision too small: need at least {needed} digits, field carries {available}")]
    Precision { needed: u32, available: u32 },
    #[error("enumeration of {what} has {cardinality} elements, over the budget of {budget}")]
    Budget {
        what: String,
        cardinality: u128,
        budget: u64,
    },
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("element is not in {0}")]
    NotInSubgroup(String),
    #[error("infinite set: {0}")]
    InfiniteSet(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("inner product is not an integer: {0}")]
    NonIntegral(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 1,
            _ => 2,
        }
    }
}

pub(crate) fn budget_check(what: &str, cardinality: u128, budget: u64) -> Result<()> {
    if cardinality > budget as u128 {
        Err(Error::Budget {
            what: what.to_string(),
            cardinality,
            budget,
        })
    } else {
        Ok(())
    }
}
