use thiserror::Error;

use crate::params::Variant;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter range violated: {0}")]
    RangeViolation(String),

    #[error("variant {variant} requires {expected} N, got N = {n}")]
    ParityMismatch {
        variant: Variant,
        expected: &'static str,
        n: usize,
    },

    #[error("N = {n} is below the fractional-revival classification threshold {min} for {variant}")]
    TooSmall {
        variant: Variant,
        n: usize,
        min: usize,
    },

    #[error("operation requires variant {expected}, got {got}")]
    WrongVariant { expected: Variant, got: Variant },

    #[error("square-root argument {value} is not positive at n = {n}")]
    NegativeRadicand { n: usize, value: f64 },

    #[error("division by zero at n = {n}")]
    DivisionByZero { n: usize },

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} sweeps")]
    ConvergenceFailure { index: usize, iterations: usize },

    #[error("no perfect state transfer is scheduled for theta = {p}/{q}")]
    NoPstScheduled { p: i64, q: i64 },

    #[error("full Hamiltonian for N = {n} exceeds the cap N <= {cap}")]
    DimensionCap { n: usize, cap: usize },

    #[error("matrix is not persymmetric (deviation {deviation:e})")]
    NotPersymmetric { deviation: f64 },

    #[error("value {value} outside the admissible range {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("malformed coupling table: {0}")]
    Table(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("I/O: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
