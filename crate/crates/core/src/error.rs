use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex set mismatch: expected {expected} components, got {got}")]
    VertexMismatch { expected: usize, got: usize },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("non-reflectable vertex {0}: reflections are defined only at loop-free vertices")]
    NonReflectableVertex(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-integral Tate weight in {0}")]
    NonIntegralTateWeight(String),
    #[error("pole at evaluation point L = {0}")]
    Pole(u64),
    #[error("non-unit constant term")]
    NonUnitConstant,
    #[error("constant term must be {expected}")]
    BadConstantTerm { expected: &'static str },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("not polynomial-count at this degree bound: {0}")]
    NotPolynomialCount(String),
    #[error("denominator failed to clear for {0}")]
    DenominatorNotCleared(String),
    #[error("Kac positivity violated: {0}")]
    Positivity(String),
    #[error("dimension vector outside the table bound: {0:?}")]
    OutsideBound(Vec<u32>),
    #[error("imaginary vertices unsupported by this oracle")]
    ImaginaryUnsupported,
    #[error("degenerate charge: {0}")]
    DegenerateCharge(String),
    #[error("invalid central charge: {0}")]
    InvalidCharge(String),
    #[error("invalid form parameter: {0}")]
    InvalidFormParam(String),
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
    #[error("no oracle applies to {0:?}")]
    NoOracle(Vec<u32>),
    #[error("calibration failed: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
