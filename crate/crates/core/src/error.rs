use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parity hypothesis violated: finite ramification set {finite:?} has even size")]
    ParityViolation { finite: Vec<u64> },
    #[error("sign hypothesis violated: sgn(l) = {sgn_l} but (-1)^k = {expected}")]
    SignViolation { sgn_l: i64, expected: i64 },
    #[error("conductor of l ({conductor}) is not coprime to 2N = {two_n}")]
    ConductorClash { conductor: u64, two_n: u64 },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("out of scope: {0}")]
    ScopeError(String),
    #[error("mass mismatch: found {found}, expected {expected}")]
    MassMismatch { found: String, expected: String },
    #[error("weight propagation conflict at p = {p}")]
    PropagationConflict { p: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensystem is not rational at p = {p}")]
    IrrationalEigenvalue { p: u64 },
    #[error("form is not an eigenvector of the involution at p = {p}")]
    NotEigen { p: u64 },
    #[error("index out of table range: {0}")]
    RangeError(String),
    #[error("no represented value coprime to {modulus} below the search bound")]
    NoCoprimeValue { modulus: u64 },
    #[error("singular Gram matrix")]
    SingularGram,
    #[error("precision {target:e} unreachable within {cap} terms")]
    PrecisionUnreachable { target: f64, cap: usize },
    #[error("insufficient precision: error {error:e} against smallest value {smallest:e}")]
    InsufficientPrecision { error: f64, smallest: f64 },
    #[error("missing eigenvalue at prime {0}")]
    MissingPrime(u64),
    #[error("eigenform matching failed: {0}")]
    Eigenform(String),
    #[error("representative norm {norm} is not coprime to the conductor {conductor}")]
    NormClash { norm: String, conductor: u64 },
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
