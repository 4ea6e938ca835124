use thiserror::Error;

/// Errors raised by graph construction, spectral computations and the
/// experiment estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The operation's precondition does not hold for this input
    /// (e.g. adding an edge that already exists).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A degree-normalized operator was requested for a graph with an
    /// isolated vertex, where `D^{-1/2}` is undefined.
    #[error("degenerate input: vertex {vertex} has degree 0")]
    IsolatedVertex { vertex: usize },

    /// Non-finite matrix entries or a failed numerical routine.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Malformed serialized input (graph fixtures, configs).
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
