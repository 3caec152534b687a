use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured order/degree/truncation cap was exceeded.
    #[error("{what} = {value} exceeds the cap {max}")]
    Cap { what: &'static str, value: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),

    /// Array lengths or grid layouts do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// An operation was invoked on data that lacks a required piece.
    #[error("state error: {0}")]
    State(String),

    /// A parameter lies outside the range covered by the data or the statement.
    #[error("range error: {0}")]
    Range(String),

    #[error("I/O error: {0}")]
    Io(String),

    /// A computed value overflowed or became non-finite.
    #[error("non-finite result: {0}")]
    NonFinite(String),
}
