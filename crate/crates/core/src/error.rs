use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit exceeded: {what}")]
    ResourceLimit {
        what: String,
        /// Best known upper bound on the quantity being computed, when one exists.
        best_upper: Option<u64>,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate xi: the identity element cannot define related sets")]
    DegenerateXi,
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
