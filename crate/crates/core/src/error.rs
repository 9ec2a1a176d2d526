use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("expected an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("{ell} is not congruent to 1 modulo {p}")]
    NotOneModP { ell: u64, p: u64 },
    #[error("{g} is divisible by {ell}")]
    NotCoprime { g: i64, ell: u64 },
    #[error("prime {ell} is excluded for this radical (p = {p})")]
    ExcludedPrime { ell: u64, p: u64 },
    #[error("Bernoulli index {0} must be even and at least 2")]
    OddBernoulliIndex(u64),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("{0} is not a valid quadratic field parameter")]
    InvalidQuadratic(i64),
    #[error("invalid extension shape: {0}")]
    InvalidExtension(String),
    #[error("{0} does not ramify in the extension")]
    Unramified(u64),
    #[error("twist {0} is out of range")]
    InvalidTwist(u64),
    #[error("invalid Tate module: {0}")]
    InvalidModule(String),
    #[error("module of order {m} exceeds the enumeration cap {cap}")]
    ModuleTooLarge { m: u64, cap: u64 },
    #[error("{0} is outside the deterministic primality range")]
    PrimalityRange(String),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable variant name, used in machine-readable error payloads.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::NotOddPrime(_) => "NotOddPrime",
            Error::NotOneModP { .. } => "NotOneModP",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::ExcludedPrime { .. } => "ExcludedPrime",
            Error::OddBernoulliIndex(_) => "OddBernoulliIndex",
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::InvalidQuadratic(_) => "InvalidQuadratic",
            Error::InvalidExtension(_) => "InvalidExtension",
            Error::Unramified(_) => "Unramified",
            Error::InvalidTwist(_) => "InvalidTwist",
            Error::InvalidModule(_) => "InvalidModule",
            Error::ModuleTooLarge { .. } => "ModuleTooLarge",
            Error::PrimalityRange(_) => "PrimalityRange",
            Error::Overflow(_) => "Overflow",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
