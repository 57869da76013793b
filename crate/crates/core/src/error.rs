use thiserror::Error;

/// Errors produced anywhere in the construction, certification and decoding
/// pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field size {p}^{e} is outside the supported range (q <= 4096)")]
    FieldTooLarge { p: u32, e: u32 },
    #[error("modulus {0:?} is reducible or has the wrong degree")]
    ReducibleModulus(Vec<u32>),
    #[error("no default modulus for degree {0}")]
    NoDefaultModulus(u32),
    #[error("subgroup order {m} does not divide q-1 = {q_minus_1}")]
    SubgroupOrder { m: u32, q_minus_1: u32 },
    #[error("zero has no multiplicative coset")]
    ZeroCoset,
    #[error("element {0} is not in the field")]
    NotInField(u32),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("X-row {x_row} and Z-row {z_row} share {shared} columns; lifting needs 0 or 2")]
    OverlapHypothesis {
        x_row: usize,
        z_row: usize,
        shared: usize,
    },
    #[error("support violates precondition: {0}")]
    SupportPrecondition(String),
    #[error("generated support {0:?} is not in ker H_X")]
    OrbitLeftKernel(Vec<usize>),
    #[error("invalid lift: {0}")]
    InvalidLift(String),
    #[error("matrix pair is not orthogonal")]
    NotOrthogonal,
    #[error("{0}")]
    Invalid(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
