use serde::{Deserialize, Serialize};

/// Resource limits for the exact and brute-force routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest dense grid (number of sites) the kernel DP may allocate.
    pub max_states: usize,
    /// Largest `n` for which bridges of length `2n` are enumerated one by one.
    pub max_brute_n: usize,
    /// Largest vertex count for exhaustive spanning-tree enumeration.
    pub max_exact_vertices: usize,
    /// Largest number of multiply-adds for the factorised coincidence table.
    pub max_table_terms: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 1 << 24,
            max_brute_n: 11,
            max_exact_vertices: 8,
            max_table_terms: 20_000_000_000,
        }
    }
}
