use thiserror::Error;

use crate::orders::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("side mismatch: expected {expected}, found {found}")]
    SideMismatch { expected: Side, found: Side },

    #[error("order {id} is not a member of the given order set")]
    NotFound { id: u64 },

    #[error("{what} = {value} is out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("invalid order book: {0}")]
    InvalidBook(#[from] BookError),

    #[error("matching is not valid over the book ({violations} violation(s)); first: {first}")]
    InvalidMatching { violations: usize, first: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large for the oracle: {volume} units exceeds the limit of {limit}")]
    TooLarge { volume: u64, limit: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reasons an order book is rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BookError {
    #[error("duplicate order id {0}")]
    DuplicateId(u64),
    #[error("duplicate timestamp {timestamp} among {side}s (orders {first} and {second})")]
    DuplicateTimestamp {
        side: Side,
        timestamp: u64,
        first: u64,
        second: u64,
    },
    #[error("order {0} has zero quantity")]
    ZeroQuantity(u64),
    #[error("order {0} carries a sentinel price; only dummy orders may")]
    SentinelPrice(u64),
    #[error("order {id} is listed with the wrong side (expected {expected})")]
    WrongSide { id: u64, expected: Side },
    #[error("order {id}: {field} {value} is reserved (maximum allowed {max})")]
    Reserved {
        id: u64,
        field: &'static str,
        value: u64,
        max: u64,
    },
}
