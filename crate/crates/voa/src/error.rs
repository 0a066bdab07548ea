//! Errors and check witnesses for the algebraic layer.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VoaError {
    #[error("truncation overflow: needed depth {needed} exceeds N_max {max}")]
    Truncation { needed: i64, max: u32 },
    #[error("mixed instances: {0}")]
    MixedInstances(String),
    #[error("evaluation point z must be nonzero")]
    ZeroEvaluationPoint,
    #[error("window exhausted: {0}")]
    WindowExhausted(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Formal(#[from] voa_formal::FormalError),
}

/// A failed exact comparison, with enough data to reproduce it.
#[derive(Debug, Clone)]
pub struct CheckWitness {
    /// Where the mismatch happened (exponents, mode indices, ...).
    pub site: String,
    /// Basis element the two sides disagree on.
    pub component: String,
    pub left: String,
    pub right: String,
}

impl std::fmt::Display for CheckWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "at {} on {}: left = {}, right = {}",
            self.site, self.component, self.left, self.right
        )
    }
}

/// Result of an exact windowed check.
#[derive(Debug, Clone)]
pub enum Checked {
    Holds,
    Fails(CheckWitness),
}

impl Checked {
    pub fn holds(&self) -> bool {
        matches!(self, Checked::Holds)
    }

    pub fn witness(&self) -> Option<&CheckWitness> {
        match self {
            Checked::Holds => None,
            Checked::Fails(w) => Some(w),
        }
    }

    pub fn and(self, other: impl FnOnce() -> Checked) -> Checked {
        match self {
            Checked::Holds => other(),
            fails => fails,
        }
    }
}
