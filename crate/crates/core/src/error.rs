use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad reduction at p = {p} for {curve}")]
    BadReduction { p: u64, curve: String },
    #[error("twist must be a nonzero integer")]
    ZeroTwist,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inadmissible group action: {0}")]
    Inadmissible(String),
    #[error("configuration is not rigid (h21 = {0})")]
    NotRigid(u32),
    #[error("even dimension n = {0} has no middle intermediate Jacobian")]
    EvenDimension(u32),
    #[error("need {needed} coefficients but only {available} are available")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("i/o error at {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed cache file {path}: {message}")]
    Cache { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
