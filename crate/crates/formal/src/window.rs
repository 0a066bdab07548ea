//! Exponent windows and extended-integer bounds.
//!
//! A window is a finite box of exponents, one interval per variable, on
//! which identities are checked exactly. Exponents are stored scaled by the
//! global denominator of the variable set, so all bound arithmetic is
//! integral.

use crate::vars::Vars;
use num_rational::BigRational;
use std::sync::Arc;

/// Integer extended by +/- infinity, for support and exactness bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Int(i64),
    PosInf,
}

impl Ext {
    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Int(_))
    }

    /// Addition of like-signed bounds. NegInf + PosInf is a caller bug.
    pub fn add(self, rhs: Ext) -> Ext {
        match (self, rhs) {
            (Ext::Int(a), Ext::Int(b)) => Ext::Int(a + b),
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => {
                panic!("indeterminate bound arithmetic")
            }
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
        }
    }

    pub fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Int(a) => Ext::Int(-a),
        }
    }
}

/// A closed interval of scaled exponents; empty iff lo > hi.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: Ext,
    pub hi: Ext,
}

impl Span {
    pub fn all() -> Span {
        Span { lo: Ext::NegInf, hi: Ext::PosInf }
    }

    pub fn empty() -> Span {
        Span { lo: Ext::PosInf, hi: Ext::NegInf }
    }

    pub fn point(e: i64) -> Span {
        Span { lo: Ext::Int(e), hi: Ext::Int(e) }
    }

    pub fn new(lo: Ext, hi: Ext) -> Span {
        Span { lo, hi }
    }

    pub fn is_empty(self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(self, e: i64) -> bool {
        self.lo <= Ext::Int(e) && Ext::Int(e) <= self.hi
    }

    pub fn covers(self, other: Span) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn union(self, other: Span) -> Span {
        if self.is_empty() {
            return other;
        }
        if other.is_empty() {
            return self;
        }
        Span { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(self, other: Span) -> Span {
        Span { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }

    /// Minkowski sum; empty absorbs.
    pub fn sum(self, other: Span) -> Span {
        if self.is_empty() || other.is_empty() {
            return Span::empty();
        }
        Span { lo: self.lo.add(other.lo), hi: self.hi.add(other.hi) }
    }
}

/// Per-variable exponent bounds plus an optional weight cutoff for graded
/// instances. Bounds are inclusive and stored scaled by the variable-set
/// denominator.
#[derive(Clone, Debug)]
pub struct Window {
    vars: Arc<Vars>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    pub weight_cutoff: Option<BigRational>,
}

impl Window {
    /// Window with identical integer bounds [lo, hi] for every variable.
    pub fn uniform(vars: &Arc<Vars>, lo: i64, hi: i64) -> Window {
        assert!(lo <= hi, "window bounds must satisfy lo <= hi");
        let d = vars.denom();
        Window {
            vars: vars.clone(),
            lo: vec![lo * d; vars.len()],
            hi: vec![hi * d; vars.len()],
            weight_cutoff: None,
        }
    }

    /// |exponent| <= k in every variable.
    pub fn sym(vars: &Arc<Vars>, k: i64) -> Window {
        Window::uniform(vars, -k, k)
    }

    /// Override the (integer) bounds of one variable.
    pub fn with(mut self, name: &str, lo: i64, hi: i64) -> Window {
        let i = self.vars.index(name);
        let d = self.vars.denom();
        self.lo[i] = lo * d;
        self.hi[i] = hi * d;
        self
    }

    /// Override bounds of one variable in scaled units.
    pub fn with_scaled(mut self, name: &str, lo: i64, hi: i64) -> Window {
        let i = self.vars.index(name);
        self.lo[i] = lo;
        self.hi[i] = hi;
        self
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn lo(&self, i: usize) -> i64 {
        self.lo[i]
    }

    pub fn hi(&self, i: usize) -> i64 {
        self.hi[i]
    }

    pub fn span(&self, i: usize) -> Span {
        Span { lo: Ext::Int(self.lo[i]), hi: Ext::Int(self.hi[i]) }
    }

    pub fn contains(&self, exps: &[i64]) -> bool {
        exps.iter()
            .enumerate()
            .all(|(i, &e)| self.lo[i] <= e && e <= self.hi[i])
    }

    /// Grow every bound outward by `slack` scaled units.
    pub fn enlarged(&self, slack: i64) -> Window {
        Window {
            vars: self.vars.clone(),
            lo: self.lo.iter().map(|&l| l - slack).collect(),
            hi: self.hi.iter().map(|&h| h + slack).collect(),
            weight_cutoff: self.weight_cutoff.clone(),
        }
    }
}
