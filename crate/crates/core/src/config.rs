//! Resource bounds shared by the enumeration-heavy operations.

use std::env;

pub const ENV_MAX_ORDER: &str = "METAZETA_MAX_ORDER";
pub const ENV_MAX_SUBGROUPS: &str = "METAZETA_MAX_SUBGROUPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest group order the oracle will build.
    pub max_order: u64,
    /// Cap on the number of subgroups collected by one enumeration.
    pub max_subgroups: usize,
    /// Largest modulus `p^m` whose residues are enumerated when listing valid `k`.
    pub max_residues: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: 1 << 12,
            max_subgroups: 100_000,
            max_residues: 1 << 24,
        }
    }
}

impl Limits {
    /// Defaults overridden by `METAZETA_MAX_ORDER` / `METAZETA_MAX_SUBGROUPS` when set.
    /// Unparsable values are ignored.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(v) = env::var(ENV_MAX_ORDER).ok().and_then(|s| s.trim().parse().ok()) {
            limits.max_order = v;
        }
        if let Some(v) = env::var(ENV_MAX_SUBGROUPS).ok().and_then(|s| s.trim().parse().ok()) {
            limits.max_subgroups = v;
        }
        limits
    }

    pub fn with_max_order(mut self, max_order: u64) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn with_max_subgroups(mut self, max_subgroups: usize) -> Self {
        self.max_subgroups = max_subgroups;
        self
    }
}
