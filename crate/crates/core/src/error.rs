use thiserror::Error;

/// Errors surfaced by the library. Exhaustive-enumeration guards get their own
/// variant so callers (notably the CLI) can distinguish "input too large for the
/// configured caps" from malformed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid market: {0}")]
    InvalidMarket(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
