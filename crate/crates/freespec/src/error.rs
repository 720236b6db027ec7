//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration or matrix-size cap was exceeded.  Caps exist because
    /// diagram counts grow like 4^k; callers asking for more than the cap
    /// almost certainly mistyped.
    #[error("{what} = {requested} exceeds the supported cap {limit}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Malformed or out-of-range input (bad rational string, vertex out of
    /// bounds, horizon mismatch, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The pairing Gram matrix is not invertible.  For n = 1 and k >= 2 it is
    /// the all-ones matrix of rank one, so no Weingarten data exists there.
    #[error("gram matrix for k = {k}, n = {n} is singular")]
    SingularGram { k: usize, n: u64 },

    /// Exact elimination ran out of nonzero pivots.
    #[error("matrix is singular")]
    SingularMatrix,

    /// Cache or report I/O failure.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 2 for invalid input or singular
    /// data, 3 for resource caps.  (Exit code 1 is reserved for verification
    /// mismatches, which are reported, not raised.)
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}
