use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(usize, usize),

    #[error("graph is not connected")]
    NotConnected,

    #[error("walk did not cover the graph: {visited} of {n} vertices after {steps} steps")]
    NonCover { visited: usize, n: usize, steps: u64 },

    #[error("sampling failed after {attempts} attempts: {what}")]
    SamplingFailure { what: String, attempts: usize },

    #[error("parameters too tight: {0}")]
    ParametersTooTight(String),

    #[error("{what} is limited to {limit}, got {got}; {hint}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
        hint: &'static str,
    },

    #[error("sparsification failed: process B_p did not succeed in {attempts} attempts")]
    SparsifyFailed { attempts: usize },

    #[error("eigen solver did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
