use serde::{Deserialize, Serialize};

/// Size limits shared by every construction that can blow up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SizeCaps {
    /// Points allowed in an operation graph or lattice.
    pub max_points: u64,
    /// Largest `|X|·|Y|` the exact Gromov-Hausdorff search accepts.
    pub exact_pairs: u64,
    /// Node budget for one exact search.
    pub node_budget: u64,
    /// Largest integer the prime sieve will reach.
    pub sieve_limit: u64,
    /// Distance entries a command may materialize or print.
    pub max_entries: u64,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps {
            max_points: 10_000,
            exact_pairs: 12 * 12,
            node_budget: 10_000_000,
            sieve_limit: 10_000_000,
            max_entries: 1_000_000,
        }
    }
}

impl SizeCaps {
    pub fn with_max_points(mut self, n: u64) -> Self {
        self.max_points = n;
        self
    }
}
