//! Sparse exact formal distributions in several variables.
//!
//! A `FormalDistribution` is a finite grid of exact coefficients together
//! with per-variable metadata describing how the grid relates to the full
//! (possibly doubly infinite) series it approximates:
//!
//! - `supp[v]`: bounds on the true support. No nonzero coefficient of the
//!   full series lies outside this interval.
//! - `known[v]`: the exactness interval. For exponent vectors whose every
//!   coordinate lies inside the known intervals, the stored coefficient
//!   (zero if absent) is exactly the coefficient of the full series.
//!   Outside, nothing is claimed unless the support bound forces zero.
//! - `degree`: when set, the full series is homogeneous of this total
//!   (scaled) degree. Delta expressions and binomial expansions carry this
//!   flag, and it is what makes products of deltas with operator series
//!   certifiable.
//!
//! Products compute the input exactness they need from support data and
//! refuse to proceed otherwise: an unbounded need is an ill-defined product,
//! a bounded one that exceeds materialization is a window-exhaustion error
//! that names the missing box. Silent truncation never happens.

use crate::error::{EqOutcome, FormalError, Witness};
use crate::scalar::Scalar;
use crate::window::{Ext, Span, Window};
use crate::vars::Vars;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct FormalDistribution {
    vars: Arc<Vars>,
    terms: BTreeMap<Vec<i64>, Scalar>,
    supp: Vec<Span>,
    known: Vec<Span>,
    degree: Option<i64>,
}

impl FormalDistribution {
    /// The zero distribution, exact everywhere.
    pub fn zero(vars: &Arc<Vars>) -> Self {
        FormalDistribution {
            vars: vars.clone(),
            terms: BTreeMap::new(),
            supp: vec![Span::empty(); vars.len()],
            known: vec![Span::all(); vars.len()],
            degree: None,
        }
    }

    pub fn constant(vars: &Arc<Vars>, c: Scalar) -> Self {
        let exps = vec![0i64; vars.len()];
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        let supp = if terms.is_empty() {
            vec![Span::empty(); vars.len()]
        } else {
            vec![Span::point(0); vars.len()]
        };
        FormalDistribution {
            vars: vars.clone(),
            terms,
            supp,
            known: vec![Span::all(); vars.len()],
            degree: Some(0),
        }
    }

    pub fn one(vars: &Arc<Vars>) -> Self {
        Self::constant(vars, Scalar::one())
    }

    /// c * prod_v v^(exps[v]/D), exponents given in scaled units.
    pub fn monomial_scaled(vars: &Arc<Vars>, exps: Vec<i64>, c: Scalar) -> Self {
        assert_eq!(exps.len(), vars.len());
        if c.is_zero() {
            return Self::zero(vars);
        }
        let degree = Some(exps.iter().sum());
        let supp = exps.iter().map(|&e| Span::point(e)).collect();
        let mut terms = BTreeMap::new();
        terms.insert(exps, c);
        FormalDistribution {
            vars: vars.clone(),
            terms,
            supp,
            known: vec![Span::all(); vars.len()],
            degree,
        }
    }

    /// Monomial with integer exponents.
    pub fn monomial(vars: &Arc<Vars>, pows: &[(&str, i64)], c: Scalar) -> Self {
        let d = vars.denom();
        let mut exps = vec![0i64; vars.len()];
        for (name, e) in pows {
            exps[vars.index(name)] += e * d;
        }
        Self::monomial_scaled(vars, exps, c)
    }

    /// A fully known Laurent polynomial from explicit scaled terms.
    pub fn from_terms(vars: &Arc<Vars>, iter: impl IntoIterator<Item = (Vec<i64>, Scalar)>) -> Self {
        let mut out = Self::zero(vars);
        for (e, c) in iter {
            out.accumulate(e, c);
        }
        out.recompute_poly_metadata();
        out
    }

    /// Construct from parts, for expansion kernels that know their own
    /// support analysis. Terms outside `known` are a caller bug.
    pub(crate) fn from_parts(
        vars: &Arc<Vars>,
        terms: BTreeMap<Vec<i64>, Scalar>,
        supp: Vec<Span>,
        known: Vec<Span>,
        degree: Option<i64>,
    ) -> Self {
        let mut d = FormalDistribution { vars: vars.clone(), terms, supp, known, degree };
        d.normalize_known();
        d
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self, v: usize) -> Span {
        self.supp[v]
    }

    pub fn known(&self, v: usize) -> Span {
        self.known[v]
    }

    pub fn degree(&self) -> Option<i64> {
        self.degree
    }

    /// Support classification of one variable, by name.
    pub fn support_tag(&self, name: &str) -> SupportTag {
        let s = self.supp[self.vars.index(name)];
        match (s.lo.is_finite() || s.is_empty(), s.hi.is_finite() || s.is_empty()) {
            (true, true) => SupportTag::Finite,
            (true, false) => SupportTag::LowerTruncated,
            (false, true) => SupportTag::UpperTruncated,
            (false, false) => SupportTag::DoublyInfinite,
        }
    }

    /// True when this value is exactly the zero series (not merely zero on
    /// the materialized part).
    pub fn is_zero_everywhere(&self) -> bool {
        self.terms.is_empty() && self.known.iter().all(|k| *k == Span::all())
    }

    /// Exact coefficient at a scaled exponent vector, when certified.
    pub fn coeff(&self, exps: &[i64]) -> Result<Scalar, FormalError> {
        for (v, &e) in exps.iter().enumerate() {
            if !self.known[v].contains(e) {
                return Err(FormalError::WindowExhausted {
                    what: format!(
                        "coefficient at {} not materialized (variable {})",
                        self.fmt_exps(exps),
                        self.vars.name(v)
                    ),
                });
            }
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero))
    }

    fn accumulate(&mut self, exps: Vec<i64>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn recompute_poly_metadata(&mut self) {
        let n = self.vars.len();
        let mut supp = vec![Span::empty(); n];
        let mut degree: Option<Option<i64>> = None;
        for e in self.terms.keys() {
            for v in 0..n {
                supp[v] = supp[v].union(Span::point(e[v]));
            }
            let d: i64 = e.iter().sum();
            degree = match degree {
                None => Some(Some(d)),
                Some(Some(prev)) if prev == d => Some(Some(d)),
                _ => Some(None),
            };
        }
        self.supp = supp;
        self.known = vec![Span::all(); n];
        self.degree = degree.flatten();
    }

    /// Exactness intervals are extended through regions the support bound
    /// already forces to zero.
    fn normalize_known(&mut self) {
        for v in 0..self.vars.len() {
            if self.supp[v].is_empty() {
                self.known[v] = Span::all();
                continue;
            }
            if self.known[v].lo <= self.supp[v].lo {
                self.known[v].lo = Ext::NegInf;
            }
            if self.known[v].hi >= self.supp[v].hi {
                self.known[v].hi = Ext::PosInf;
            }
        }
    }

    fn check_same_vars(&self, other: &Self) -> Result<(), FormalError> {
        if !Arc::ptr_eq(&self.vars, &other.vars) && self.vars != other.vars {
            return Err(FormalError::VariableMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x * c))
            .collect();
        FormalDistribution { terms, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormalError> {
        self.check_same_vars(other)?;
        if self.is_zero_everywhere() {
            return Ok(other.clone());
        }
        if other.is_zero_everywhere() {
            return Ok(self.clone());
        }
        let mut out = FormalDistribution {
            vars: self.vars.clone(),
            terms: self.terms.clone(),
            supp: self
                .supp
                .iter()
                .zip(&other.supp)
                .map(|(a, b)| a.union(*b))
                .collect(),
            known: self
                .known
                .iter()
                .zip(&other.known)
                .map(|(a, b)| a.intersect(*b))
                .collect(),
            degree: match (self.degree, other.degree) {
                (Some(a), Some(b)) if a == b => Some(a),
                _ => None,
            },
        };
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c.clone());
        }
        // drop terms where either operand was not exact
        out.terms.retain(|e, _| {
            e.iter().enumerate().all(|(v, &x)| {
                (self.known[v].contains(x) || !self.supp[v].contains(x))
                    && (other.known[v].contains(x) || !other.supp[v].contains(x))
            })
        });
        out.normalize_known();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormalError> {
        self.add(&other.neg())
    }

    /// Exact product on `window`.
    ///
    /// The needed input exactness is derived from the support metadata (with
    /// homogeneity tightening); if the true supports oppose each other in a
    /// way no finite window fixes, this is an ill-defined product.
    pub fn mul(&self, other: &Self, window: &Window) -> Result<Self, FormalError> {
        self.check_same_vars(other)?;
        if self.is_zero_everywhere() || other.is_zero_everywhere() {
            return Ok(Self::zero(&self.vars));
        }
        let n = self.vars.len();

        // recession test: a nonzero direction d with d feasible for the
        // support of self and -d for other means some output coefficient is
        // an infinite sum
        let plane = self.degree.is_some() || other.degree.is_some();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for v in 0..n {
            if self.supp[v].is_empty() || other.supp[v].is_empty() {
                return Ok(Self::zero(&self.vars));
            }
            if self.supp[v].hi == Ext::PosInf && other.supp[v].lo == Ext::NegInf {
                pos.push(v);
            }
            if self.supp[v].lo == Ext::NegInf && other.supp[v].hi == Ext::PosInf {
                neg.push(v);
            }
        }
        let ill = if plane {
            pos.iter().any(|p| neg.iter().any(|q| q != p))
        } else {
            !pos.is_empty() || !neg.is_empty()
        };
        if ill {
            return Err(FormalError::IllDefinedProduct {
                var: self
                    .vars
                    .name(*pos.first().or(neg.first()).unwrap())
                    .to_string(),
            });
        }

        let need_a = needed_box(&self.supp, self.degree, &other.supp, other.degree, window)?;
        let need_b = needed_box(&other.supp, other.degree, &self.supp, self.degree, window)?;
        for v in 0..n {
            for (need, dist, side) in
                [(&need_a, self, "left"), (&need_b, other, "right")]
            {
                if !dist.known[v].covers(need[v]) {
                    return Err(FormalError::WindowExhausted {
                        what: format!(
                            "product needs the {side} factor exact on {} for {}, have {}",
                            fmt_span(need[v], self.vars.denom()),
                            self.vars.name(v),
                            fmt_span(dist.known[v], self.vars.denom()),
                        ),
                    });
                }
            }
        }

        let mut out = FormalDistribution {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            supp: self
                .supp
                .iter()
                .zip(&other.supp)
                .map(|(a, b)| a.sum(*b))
                .collect(),
            known: (0..n).map(|v| window.span(v)).collect(),
            degree: match (self.degree, other.degree) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        };
        let mut buf = vec![0i64; n];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut inside = true;
                for v in 0..n {
                    buf[v] = ea[v] + eb[v];
                    if buf[v] < window.lo(v) || buf[v] > window.hi(v) {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    out.accumulate(buf.clone(), ca * cb);
                }
            }
        }
        out.normalize_known();
        Ok(out)
    }

    /// Coefficient of var^(-1), as a distribution constant in `var`.
    pub fn residue(&self, name: &str) -> Result<Self, FormalError> {
        let v = self.vars.index(name);
        let d = self.vars.denom();
        if !self.known[v].contains(-d) {
            return Err(FormalError::WindowExhausted {
                what: format!("residue in {name} needs exponent -1 materialized"),
            });
        }
        let mut out = FormalDistribution {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            supp: self.supp.clone(),
            known: self.known.clone(),
            degree: self.degree.map(|deg| deg + d),
        };
        out.supp[v] = Span::point(0);
        out.known[v] = Span::all();
        for (e, c) in &self.terms {
            if e[v] == -d {
                let mut e2 = e.clone();
                e2[v] = 0;
                out.accumulate(e2, c.clone());
            }
        }
        // supports of the remaining variables can only shrink; keeping the
        // original bounds is sound
        out.supp[v] = Span::point(0);
        out.normalize_known();
        Ok(out)
    }

    /// Term-wise d/d(var).
    pub fn derive(&self, name: &str) -> Self {
        let v = self.vars.index(name);
        let d = self.vars.denom();
        let mut out = FormalDistribution {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
            supp: self.supp.clone(),
            known: self.known.clone(),
            degree: self.degree.map(|deg| deg - d),
        };
        out.supp[v] = Span {
            lo: out.supp[v].lo.add(Ext::Int(-d)),
            hi: out.supp[v].hi.add(Ext::Int(-d)),
        };
        out.known[v] = Span {
            lo: out.known[v].lo.add(Ext::Int(-d)),
            hi: out.known[v].hi.add(Ext::Int(-d)),
        };
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] -= d;
            let factor = Scalar::Rat(BigRational::new(BigInt::from(e[v]), BigInt::from(d)));
            out.accumulate(e2, c * &factor);
        }
        out.normalize_known();
        out
    }

    /// Iterated derivative.
    pub fn derive_n(&self, name: &str, k: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.derive(name);
        }
        out
    }

    /// Exact equality on a window; on failure yields the first differing
    /// exponent vector with both coefficients.
    pub fn window_equal(&self, other: &Self, window: &Window) -> Result<EqOutcome, FormalError> {
        self.check_same_vars(other)?;
        let n = self.vars.len();
        for v in 0..n {
            for (dist, side) in [(self, "left"), (other, "right")] {
                if !dist.known[v].covers(window.span(v)) {
                    return Err(FormalError::WindowExhausted {
                        what: format!(
                            "window_equal: {side} operand not exact on {} for {}",
                            fmt_span(window.span(v), self.vars.denom()),
                            self.vars.name(v)
                        ),
                    });
                }
            }
        }
        let mut keys: Vec<&Vec<i64>> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| window.contains(e))
            .collect();
        keys.sort();
        keys.dedup();
        for e in keys {
            let a = self.terms.get(e).cloned().unwrap_or_else(Scalar::zero);
            let b = other.terms.get(e).cloned().unwrap_or_else(Scalar::zero);
            if a != b {
                return Ok(EqOutcome::Differs(Witness {
                    exps: self.fmt_exps(e),
                    left: a.to_string(),
                    right: b.to_string(),
                }));
            }
        }
        Ok(EqOutcome::Equal)
    }

    pub fn fmt_exps(&self, exps: &[i64]) -> String {
        let d = self.vars.denom();
        let mut out = String::new();
        for (v, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            if e % d == 0 {
                out.push_str(&format!("{}^{}", self.vars.name(v), e / d));
            } else {
                out.push_str(&format!("{}^({}/{})", self.vars.name(v), e, d));
            }
        }
        if out.is_empty() {
            out.push_str("1");
        }
        out
    }
}

/// Support classification of a single variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportTag {
    Finite,
    LowerTruncated,
    UpperTruncated,
    DoublyInfinite,
}

/// Hull of the exponents of `a_supp` that can contribute to an output inside
/// `window` against a factor with support `b_supp`, tightened through the
/// homogeneity planes. Used both to validate exactness and to report the
/// enlargement a failing product would need.
fn needed_box(
    a_supp: &[Span],
    a_deg: Option<i64>,
    b_supp: &[Span],
    b_deg: Option<i64>,
    window: &Window,
) -> Result<Vec<Span>, FormalError> {
    let n = a_supp.len();
    let mut need: Vec<Span> = (0..n)
        .map(|v| {
            let lo = a_supp[v]
                .lo
                .max(Ext::Int(window.lo(v)).add(b_supp[v].hi.neg()));
            let hi = a_supp[v]
                .hi
                .min(Ext::Int(window.hi(v)).add(b_supp[v].lo.neg()));
            Span { lo, hi }
        })
        .collect();

    // admissible total degree of the a-side term
    let out_lo: i64 = (0..n).map(|v| window.lo(v)).sum();
    let out_hi: i64 = (0..n).map(|v| window.hi(v)).sum();
    let mut sum_lo = match a_deg {
        Some(d) => Ext::Int(d),
        None => Ext::NegInf,
    };
    let mut sum_hi = match a_deg {
        Some(d) => Ext::Int(d),
        None => Ext::PosInf,
    };
    if let Some(db) = b_deg {
        sum_lo = sum_lo.max(Ext::Int(out_lo - db));
        sum_hi = sum_hi.min(Ext::Int(out_hi - db));
    }

    for _round in 0..3 {
        for v in 0..n {
            // sum of bounds of the other coordinates
            let mut rest_lo = Ext::Int(0);
            let mut rest_hi = Ext::Int(0);
            for w in 0..n {
                if w == v {
                    continue;
                }
                rest_lo = rest_lo.add(need[w].lo);
                rest_hi = rest_hi.add(need[w].hi);
            }
            if sum_hi.is_finite() && rest_lo.is_finite() {
                need[v].hi = need[v].hi.min(sum_hi.add(rest_lo.neg()));
            }
            if sum_lo.is_finite() && rest_hi.is_finite() {
                need[v].lo = need[v].lo.max(sum_lo.add(rest_hi.neg()));
            }
        }
    }
    Ok(need)
}

fn fmt_span(s: Span, d: i64) -> String {
    let f = |e: Ext| match e {
        Ext::NegInf => "-inf".to_string(),
        Ext::PosInf => "+inf".to_string(),
        Ext::Int(x) => {
            if x % d == 0 {
                format!("{}", x / d)
            } else {
                format!("{x}/{d}")
            }
        }
    };
    format!("[{}, {}]", f(s.lo), f(s.hi))
}

impl fmt::Display for FormalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*{}", c, self.fmt_exps(e))?;
        }
        Ok(())
    }
}
