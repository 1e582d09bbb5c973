//! Word-problem oracles: the `MarkedGroup` abstraction and the catalog of
//! concrete group families.

use serde::{Deserialize, Serialize};

/// Outcome of a (possibly budgeted) triviality query.
///
/// `Trivial` and `Nontrivial` are certified and final; `Unknown` is only
/// produced by budgeted semi-oracles and carries the effort spent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Unknown(Effort),
}

impl Verdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Verdict::Trivial)
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }
}

/// How much work a budgeted oracle performed before giving up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effort {
    /// The budget the caller allowed, in deterministic work units.
    pub budget: u64,
    /// Work units actually spent.
    pub spent: u64,
    /// What the work units count.
    pub unit: &'static str,
}
