use serde::{Deserialize, Serialize};

use crate::geometry::DEFAULT_BIT_CAP;

/// Resource limits shared by every exact computation.
///
/// Exceeding any of them produces [`crate::Error::Budget`] or
/// [`crate::Error::BitCap`]; nothing degrades silently to floating point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum bit width of any rational produced by map evaluation.
    pub bit_cap: u64,
    /// Maximum number of distinct atoms kept by the n-step distribution DP.
    pub atom_budget: usize,
    /// Maximum number of pieces in a materialized composed map.
    pub piece_budget: usize,
    /// Maximum number of intervals in an iterated image or preimage set.
    pub set_budget: usize,
    /// Maximum number of single-map evaluations spent in depth-first word
    /// enumeration once the atom budget is exhausted.
    pub work_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            bit_cap: DEFAULT_BIT_CAP,
            atom_budget: 1_000_000,
            piece_budget: 1_000_000,
            set_budget: 1 << 21,
            work_budget: 200_000_000,
        }
    }
}
