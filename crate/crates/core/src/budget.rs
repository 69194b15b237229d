//! Size caps for the exponential constructions.

use std::sync::RwLock;

use crate::error::{Error, Result};

/// Environment variable overriding [`Budget::max_poset`].
pub const BUDGET_ENV: &str = "CHAINMAIL_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest poset accepted from user input.
    pub max_poset: usize,
    /// Largest derived structure (D-lattices, separation posets, builder outputs).
    pub max_lattice: usize,
    /// Largest enumeration size.
    pub max_enumeration: usize,
    /// Largest ground set for graphs, hypergraphs, topologies and connectivity spaces.
    pub max_points: usize,
    /// Largest ground set for the connectivity representation search.
    pub max_search_points: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_poset: 24, max_lattice: 1 << 16, max_enumeration: 10, max_points: 5, max_search_points: 8 }
    }
}

static CURRENT: RwLock<Budget> = RwLock::new(Budget {
    max_poset: 24,
    max_lattice: 1 << 16,
    max_enumeration: 10,
    max_points: 5,
    max_search_points: 8,
});

impl Budget {
    /// The process-wide budget.
    pub fn current() -> Budget {
        *CURRENT.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Replace the process-wide budget.
    pub fn install(self) {
        *CURRENT.write().unwrap_or_else(|e| e.into_inner()) = self;
    }

    /// Default budget with `CHAINMAIL_BUDGET` applied to the poset cap.
    pub fn from_env() -> Result<Budget> {
        let mut b = Budget::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            b.max_poset =
                v.trim().parse().map_err(|_| Error::Malformed(format!("{BUDGET_ENV}={v:?} is not a count")))?;
        }
        Ok(b)
    }
}

pub(crate) fn check(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::SizeBudgetExceeded { what, size, cap })
    } else {
        Ok(())
    }
}
