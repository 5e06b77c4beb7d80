use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// A vertex id that does not exist in the tree at hand.
    #[error("invalid vertex {id} for depth {depth}")]
    InvalidVertex { id: u64, depth: u32 },

    /// A request that exceeds a configured storage or depth cap.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested signature has no matching embedding.
    #[error("no witness: signature {signature:#x} is not realizable")]
    NoWitness { signature: u64 },

    /// A structure failed validation against its invariants.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Malformed textual input (subset, coloring, witness or tree files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
