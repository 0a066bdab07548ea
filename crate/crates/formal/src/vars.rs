//! Ordered sets of formal variables with a shared exponent denominator.

use std::sync::Arc;

/// An ordered list of variable names together with the global exponent
/// denominator D. All exponents of distributions over this set are rationals
/// with denominator dividing D, stored as integers scaled by D.
#[derive(Debug, PartialEq, Eq)]
pub struct Vars {
    names: Vec<String>,
    denom: i64,
}

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Vars> {
        Vars::with_denom(names, 1)
    }

    pub fn with_denom<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        denom: i64,
    ) -> Arc<Vars> {
        assert!(denom >= 1);
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            assert!(
                !names[..i].contains(n),
                "duplicate variable name {n:?}"
            );
        }
        Arc::new(Vars { names, denom })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn try_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of a declared variable; panics on unknown names.
    pub fn index(&self, name: &str) -> usize {
        self.try_index(name)
            .unwrap_or_else(|| panic!("unknown variable {name:?}"))
    }
}
