//! Error and witness types for the formal calculus.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormalError {
    #[error("operands live over different variable sets")]
    VariableMismatch,
    #[error("ill-defined product: opposed infinite supports in {var}")]
    IllDefinedProduct { var: String },
    #[error("window exhausted: {what}")]
    WindowExhausted { what: String },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("exponent denominator must be 1 for expansions, got {0}")]
    FractionalExponent(String),
    #[error("{0}")]
    BadExpansion(String),
}

/// Exact coefficient mismatch found during a windowed comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub exps: String,
    pub left: String,
    pub right: String,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at {}: left = {}, right = {}", self.exps, self.left, self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqOutcome {
    Equal,
    Differs(Witness),
}

impl EqOutcome {
    pub fn is_equal(&self) -> bool {
        matches!(self, EqOutcome::Equal)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            EqOutcome::Equal => None,
            EqOutcome::Differs(w) => Some(w),
        }
    }
}
