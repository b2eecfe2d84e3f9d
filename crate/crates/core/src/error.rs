use thiserror::Error;

/// Errors raised by the tropical algebra, regression and factorization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TropError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("semiring mismatch: left operand is {left}, right operand is {right}")]
    SemiringMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("invalid entry {value} at ({row}, {col}) for the {semiring} semiring")]
    InvalidEntry {
        row: usize,
        col: usize,
        value: f64,
        semiring: &'static str,
    },

    #[error("Kleene star does not exist: maximum cycle mean {lambda} is positive")]
    StarDiverges { lambda: f64 },

    #[error("negative cycle detected through vertex {vertex}")]
    NegativeCycle { vertex: usize },

    #[error("row {row} has no finite term, so (A ⊗ x)_{row} = -inf")]
    DegenerateRow { row: usize },

    #[error("row mean undefined: entry ({row}, {col}) is not finite")]
    NonFiniteMean { row: usize, col: usize },

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, TropError>;
