//! Register state: the exact diagonal distribution and the analytic per-bit tracker.

mod diagonal;
mod tracker;

use serde::{Deserialize, Serialize};

pub use diagonal::{DiagonalState, StateSnapshot, DEFAULT_MAX_BITS};
pub use tracker::BiasTracker;

/// What a bit is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Slowly relaxing spin that stores polarization.
    Computation,
    /// Rapidly relaxing spin that drains entropy to the bath.
    Reset,
}

impl Role {
    pub fn code(self) -> char {
        match self {
            Role::Computation => 'c',
            Role::Reset => 'r',
        }
    }
}
