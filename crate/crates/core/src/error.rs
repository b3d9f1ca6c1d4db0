use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported extension degree s = {0} (supported: 2..=8)")]
    UnsupportedDegree(u32),

    #[error("polynomial {0:#b} is not a primitive polynomial of degree {1} over F2")]
    InvalidPolynomial(u32, u32),

    #[error("operands belong to different algebraic structures")]
    DomainMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("index {0} out of range for a structure with {1} elements")]
    IndexOutOfRange(usize, usize),

    #[error("Hensel lift failed: {0}")]
    LiftFailed(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("matrix is not in SL(2, F): {0}")]
    InvalidMatrix(String),

    #[error("matrix set is empty")]
    EmptySet,

    #[error("members {0} and {1} have zero relative trace")]
    NotExcluded(usize, usize),

    #[error("group of order {0} is too large to enumerate")]
    EnumerationTooLarge(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("generator matrix is not unitary")]
    InvalidGenerator,

    #[error("cannot add values scaled by 2^(-{0}/2) and 2^(-{1}/2): denominators differ by an odd power of sqrt(2)")]
    MixedParity(u32, u32),

    #[error("brute-force verification is limited to s <= 3 (got s = {0})")]
    BruteforceTooLarge(u32),
}

impl Error {
    /// Short variant name, used by the command line for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedDegree(_) => "UnsupportedDegree",
            Error::InvalidPolynomial(..) => "InvalidPolynomial",
            Error::DomainMismatch => "DomainMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::IndexOutOfRange(..) => "IndexOutOfRange",
            Error::LiftFailed(_) => "LiftFailed",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::EmptySet => "EmptySet",
            Error::NotExcluded(..) => "NotExcluded",
            Error::EnumerationTooLarge(_) => "EnumerationTooLarge",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::InvalidGenerator => "InvalidGenerator",
            Error::MixedParity(..) => "MixedParity",
            Error::BruteforceTooLarge(_) => "BruteforceTooLarge",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
