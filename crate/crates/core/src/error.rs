use thiserror::Error;

/// Errors produced by the simulator, compiler and front-end.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical quantity outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("bit index {index} out of range for a {n_bits}-bit register")]
    BitOutOfRange { index: usize, n_bits: usize },

    /// The dense representation cannot hold this many bits.
    #[error("{n_bits} bits exceeds the dense-state cap of {cap}; use a tracker-only run")]
    CapExceeded { n_bits: usize, cap: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("policy error: {0}")]
    Policy(String),

    /// A procedure was requested outside its structural bounds.
    #[error("compile error: {0}")]
    Compile(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A numerical invariant was broken during evolution.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
