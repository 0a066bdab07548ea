//! Binomial expansions and formal delta functions.
//!
//! The expansion convention is positional: a linear form lists its summands
//! in order, and raising it to any integer power expands in nonnegative
//! powers of every summand after the first. Writing the same form in the
//! other order is the other iota-expansion; for nonnegative powers both give
//! the same polynomial.

use crate::dist::FormalDistribution;
use crate::error::FormalError;
use crate::scalar::{factorial, Scalar};
use crate::vars::Vars;
use crate::window::{Ext, Span, Window};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use std::sync::Arc;

/// One summand of a linear form: a variable or an exact constant, with a
/// scalar coefficient.
#[derive(Clone, Debug)]
pub enum Atom {
    Var(String),
    Const(Scalar),
}

/// An ordered sum of atoms, e.g. x1 - x2 or z + t. The order fixes the
/// expansion direction.
#[derive(Clone, Debug)]
pub struct LinearForm {
    terms: Vec<(Scalar, Atom)>,
}

impl LinearForm {
    pub fn var(name: &str) -> LinearForm {
        LinearForm { terms: vec![(Scalar::one(), Atom::Var(name.into()))] }
    }

    /// a - b, expanded in nonnegative powers of b.
    pub fn diff(a: &str, b: &str) -> LinearForm {
        LinearForm {
            terms: vec![
                (Scalar::one(), Atom::Var(a.into())),
                (Scalar::from_int(-1), Atom::Var(b.into())),
            ],
        }
    }

    /// a + b, expanded in nonnegative powers of b.
    pub fn sum(a: &str, b: &str) -> LinearForm {
        LinearForm {
            terms: vec![
                (Scalar::one(), Atom::Var(a.into())),
                (Scalar::one(), Atom::Var(b.into())),
            ],
        }
    }

    /// -a + b, expanded in nonnegative powers of b.
    pub fn neg_sum(a: &str, b: &str) -> LinearForm {
        LinearForm {
            terms: vec![
                (Scalar::from_int(-1), Atom::Var(a.into())),
                (Scalar::one(), Atom::Var(b.into())),
            ],
        }
    }

    /// Scalar head: z + t expanded in nonnegative powers of t.
    pub fn shift(z: Scalar, t: &str) -> LinearForm {
        LinearForm {
            terms: vec![(Scalar::one(), Atom::Const(z)), (Scalar::one(), Atom::Var(t.into()))],
        }
    }

    pub fn from_terms(terms: Vec<(Scalar, Atom)>) -> LinearForm {
        assert!(!terms.is_empty());
        LinearForm { terms }
    }

    /// Append another summand (expanded nonnegatively).
    pub fn plus(mut self, coef: Scalar, name: &str) -> LinearForm {
        self.terms.push((coef, Atom::Var(name.into())));
        self
    }

    fn head_var(&self, vars: &Vars) -> Result<Option<usize>, FormalError> {
        match &self.terms[0].1 {
            Atom::Var(n) => Ok(Some(resolve(vars, n)?)),
            Atom::Const(_) => Ok(None),
        }
    }

    fn all_vars(&self) -> bool {
        self.terms.iter().all(|(_, a)| matches!(a, Atom::Var(_)))
    }
}

fn resolve(vars: &Vars, name: &str) -> Result<usize, FormalError> {
    vars.try_index(name)
        .ok_or_else(|| FormalError::UnknownVariable(name.to_string()))
}

/// The binomial-series expansion of `form^exponent`.
///
/// For a nonnegative exponent the result is the full polynomial, independent
/// of the window. For a negative exponent the series is infinite in the
/// direction of the head summand and is materialized exactly on `window`.
pub fn iota_expand(
    vars: &Arc<Vars>,
    form: &LinearForm,
    exponent: i64,
    window: &Window,
) -> Result<FormalDistribution, FormalError> {
    let d = vars.denom();
    let nv = vars.len();
    let tail = &form.terms[1..];

    // validate: head variable must not reappear in the tail
    if let Some(h) = form.head_var(vars)? {
        for (_, a) in tail {
            if let Atom::Var(n) = a {
                if resolve(vars, n)? == h {
                    return Err(FormalError::BadExpansion(
                        "head variable reappears in the tail of the form".into(),
                    ));
                }
            }
        }
    } else if tail.iter().any(|(_, a)| matches!(a, Atom::Const(_))) && exponent < 0 {
        return Err(FormalError::BadExpansion(
            "negative power of a form with more than one constant summand".into(),
        ));
    }

    let head = &form.terms[0];
    let head_idx = form.head_var(vars)?;

    // a single atom is a plain monomial
    if tail.is_empty() {
        return Ok(match (&head.1, head_idx) {
            (Atom::Var(_), Some(h)) => {
                let mut exps = vec![0i64; nv];
                exps[h] = exponent * d;
                FormalDistribution::monomial_scaled(vars, exps, head.0.pow(exponent))
            }
            (Atom::Const(z), None) => {
                FormalDistribution::constant(vars, (&head.0 * z).pow(exponent))
            }
            _ => unreachable!(),
        });
    }

    // cap on the total tail degree s
    let s_cap: i64 = if exponent >= 0 {
        exponent
    } else {
        match head_idx {
            Some(h) => {
                // head exponent is exponent - s, must stay >= window lower bound
                let cap = exponent - window.lo(h) / d;
                if cap < 0 {
                    // nothing of this series lands inside the window
                    -1
                } else {
                    cap
                }
            }
            None => {
                // scalar head: tail variables capped by their own windows
                tail.iter()
                    .map(|(_, a)| match a {
                        Atom::Var(n) => window.hi(vars.index(n)) / d,
                        Atom::Const(_) => 0,
                    })
                    .sum::<i64>()
                    .max(-1)
            }
        }
    };

    let mut terms: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
    let mut idx = vec![0i64; tail.len()];
    enumerate_tails(
        vars,
        window,
        exponent,
        head,
        head_idx,
        tail,
        &mut idx,
        0,
        0,
        s_cap,
        &mut terms,
    );

    // support and exactness metadata
    let mut supp = vec![Span::point(0); nv];
    let mut known = vec![Span::all(); nv];
    if let Some(h) = head_idx {
        if exponent >= 0 {
            supp[h] = Span::new(Ext::Int(0), Ext::Int(exponent * d));
        } else {
            supp[h] = Span::new(Ext::NegInf, Ext::Int(exponent * d));
            known[h] = Span::new(Ext::Int(window.lo(h)), Ext::PosInf);
        }
    }
    for (_, a) in tail {
        if let Atom::Var(n) = a {
            let v = vars.index(n);
            if exponent >= 0 {
                supp[v] = supp[v].union(Span::new(Ext::Int(0), Ext::Int(exponent * d)));
            } else {
                supp[v] = Span::new(Ext::Int(0), Ext::PosInf);
                known[v] = known[v].intersect(Span::new(Ext::NegInf, Ext::Int(window.hi(v))));
            }
        }
    }
    let degree = if form.all_vars() { Some(exponent * d) } else { None };
    Ok(FormalDistribution::from_parts(vars, terms, supp, known, degree))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_tails(
    vars: &Arc<Vars>,
    window: &Window,
    exponent: i64,
    head: &(Scalar, Atom),
    head_idx: Option<usize>,
    tail: &[(Scalar, Atom)],
    idx: &mut Vec<i64>,
    pos: usize,
    s_so_far: i64,
    s_cap: i64,
    out: &mut BTreeMap<Vec<i64>, Scalar>,
) {
    let d = vars.denom();
    if pos == tail.len() {
        let s = s_so_far;
        if exponent >= 0 && s > exponent {
            return;
        }
        // multinomial coefficient exponent*(exponent-1)*...*(exponent-s+1)/prod(idx!)
        let mut num = BigInt::one();
        for i in 0..s {
            num *= BigInt::from(exponent - i);
        }
        let mut den = BigInt::one();
        for &i in idx.iter() {
            den *= factorial(i as u64);
        }
        let mut coef = Scalar::Rat(BigRational::new(num, den));
        if coef.is_zero() {
            return;
        }
        let mut exps = vec![0i64; vars.len()];
        // head contribution
        let head_pow = exponent - s;
        match (&head.1, head_idx) {
            (Atom::Var(_), Some(h)) => {
                exps[h] = head_pow * d;
                if !head.0.is_one() {
                    coef = &coef * &head.0.pow(head_pow);
                }
            }
            (Atom::Const(z), None) => {
                let base = &head.0 * z;
                coef = &coef * &base.pow(head_pow);
            }
            _ => unreachable!(),
        }
        // tail contributions
        for (k, (c, a)) in tail.iter().enumerate() {
            if idx[k] == 0 {
                continue;
            }
            match a {
                Atom::Var(n) => {
                    exps[vars.index(n)] += idx[k] * d;
                    coef = &coef * &c.pow(idx[k]);
                }
                Atom::Const(z) => {
                    let base = c * z;
                    coef = &coef * &base.pow(idx[k]);
                }
            }
        }
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match out.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
        return;
    }
    let cap_here = match &tail[pos].1 {
        Atom::Var(n) => {
            let v = vars.index(n);
            (window.hi(v) / d).min(s_cap - s_so_far)
        }
        Atom::Const(_) => s_cap - s_so_far,
    };
    let mut i = 0;
    while i <= cap_here {
        idx[pos] = i;
        enumerate_tails(
            vars, window, exponent, head, head_idx, tail, idx, pos + 1, s_so_far + i, s_cap, out,
        );
        i += 1;
    }
    idx[pos] = 0;
}

/// delta(num/den) = sum over n of iota(num)^n iota(den)^(-n), materialized
/// exactly on `window`. The numerator and denominator must not share
/// variables and their heads must be variables.
pub fn delta(
    vars: &Arc<Vars>,
    num: &LinearForm,
    den: &LinearForm,
    window: &Window,
) -> Result<FormalDistribution, FormalError> {
    delta_shifted(vars, num, den, 0, window)
}

/// den^(-1) delta(num/den) = sum over n of iota(num)^n iota(den)^(-n-1),
/// the combination the Jacobi identity is written in.
pub fn delta_inv(
    vars: &Arc<Vars>,
    num: &LinearForm,
    den: &LinearForm,
    window: &Window,
) -> Result<FormalDistribution, FormalError> {
    delta_shifted(vars, num, den, -1, window)
}

fn delta_shifted(
    vars: &Arc<Vars>,
    num: &LinearForm,
    den: &LinearForm,
    den_offset: i64,
    window: &Window,
) -> Result<FormalDistribution, FormalError> {
    let d = vars.denom();
    let hn = num
        .head_var(vars)?
        .ok_or_else(|| FormalError::BadExpansion("delta numerator head must be a variable".into()))?;
    let hd = den
        .head_var(vars)?
        .ok_or_else(|| FormalError::BadExpansion("delta denominator head must be a variable".into()))?;
    for (_, a) in num.terms.iter() {
        if let Atom::Var(n) = a {
            let v = resolve(vars, n)?;
            for (_, b) in den.terms.iter() {
                if let Atom::Var(m) = b {
                    if resolve(vars, m)? == v {
                        return Err(FormalError::BadExpansion(
                            "delta numerator and denominator share a variable".into(),
                        ));
                    }
                }
            }
        }
    }

    // the head of num^n has exponent <= n, the head of den^(-n+off) has
    // exponent <= -n+off; both must be able to reach the window
    let n_lo = window.lo(hn) / d;
    let n_hi = den_offset - window.lo(hd) / d;
    let mut acc: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
    let mut n = n_lo;
    while n <= n_hi {
        let a = iota_expand(vars, num, n, window)?;
        let b = iota_expand(vars, den, -n + den_offset, window)?;
        // variable-disjoint product, restricted to the window
        for (ea, ca) in a.terms() {
            'outer: for (eb, cb) in b.terms() {
                let mut e = ea.clone();
                for (v, &x) in eb.iter().enumerate() {
                    e[v] += x;
                    if e[v] < window.lo(v) || e[v] > window.hi(v) {
                        continue 'outer;
                    }
                }
                let c = ca * cb;
                if c.is_zero() {
                    continue;
                }
                use std::collections::btree_map::Entry;
                match acc.entry(e) {
                    Entry::Vacant(en) => {
                        en.insert(c);
                    }
                    Entry::Occupied(mut en) => {
                        *en.get_mut() += &c;
                        if en.get().is_zero() {
                            en.remove();
                        }
                    }
                }
            }
        }
        n += 1;
    }

    let nv = vars.len();
    let mut supp = vec![Span::point(0); nv];
    let known: Vec<Span> = (0..nv).map(|v| window.span(v)).collect();
    supp[hn] = Span::all();
    supp[hd] = Span::all();
    for form in [num, den] {
        for (_, a) in form.terms[1..].iter() {
            if let Atom::Var(nm) = a {
                supp[vars.index(nm)] = Span::new(Ext::Int(0), Ext::PosInf);
            }
        }
    }
    let degree = Some(den_offset * d);
    Ok(FormalDistribution::from_parts(vars, acc, supp, known, degree))
}

/// Replace every power of `name` by the expansion of `form` raised to that
/// power: x^k becomes iota(form)^k, expanded in the direction the form is
/// written in. Negative powers materialize on `window`.
///
/// The input must be fully materialized in `name`.
pub fn substitute_shift(
    a: &FormalDistribution,
    name: &str,
    form: &LinearForm,
    window: &Window,
) -> Result<FormalDistribution, FormalError> {
    let vars = a.vars().clone();
    let d = vars.denom();
    let v = resolve(&vars, name)?;
    if a.known(v) != Span::all() {
        return Err(FormalError::WindowExhausted {
            what: format!("substitution target {name} must be fully materialized"),
        });
    }

    let mut affected: Vec<usize> = vec![v];
    for (_, atom) in form.terms.iter() {
        if let Atom::Var(n) = atom {
            let w = resolve(&vars, n)?;
            if !affected.contains(&w) {
                affected.push(w);
            }
        }
    }

    // expansions are materialized generously enough that every term's
    // monomial shift still lands exactly on the requested window
    let slack: i64 = a
        .terms()
        .flat_map(|(e, _)| e.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0);
    let big = window.enlarged(slack);

    let mut expansions: BTreeMap<i64, FormalDistribution> = BTreeMap::new();
    let mut acc = FormalDistribution::zero(&vars);
    let mut any_negative = false;
    for (e, c) in a.terms() {
        if e[v] % d != 0 {
            return Err(FormalError::FractionalExponent(format!(
                "{}^({}/{})",
                name, e[v], d
            )));
        }
        let k = e[v] / d;
        any_negative |= k < 0;
        let exp = match expansions.get(&k) {
            Some(x) => x.clone(),
            None => {
                let x = iota_expand(&vars, form, k, &big)?;
                expansions.insert(k, x.clone());
                x
            }
        };
        let mut rest = e.clone();
        rest[v] = 0;
        let shifted = FormalDistribution::monomial_scaled(&vars, rest, c.clone());
        let prod = exp.mul(&shifted, &big)?;
        acc = acc.add(&prod)?;
    }

    let mut supp: Vec<Span> = (0..vars.len()).map(|w| a.support(w)).collect();
    let mut known: Vec<Span> = (0..vars.len()).map(|w| a.known(w)).collect();
    if any_negative {
        let head = form.head_var(&vars)?;
        for &w in &affected {
            supp[w] = if Some(w) == head {
                Span::all()
            } else {
                Span::new(a.support(w).lo.min(Ext::Int(0)), Ext::PosInf)
            };
            known[w] = window.span(w);
        }
    } else {
        for &w in &affected {
            let mut hull = Span::empty();
            for (e, _) in acc.terms() {
                hull = hull.union(Span::point(e[w]));
            }
            supp[w] = hull;
            known[w] = Span::all();
        }
    }
    supp[v] = if affected.contains(&v) && form.terms.iter().any(|(_, at)| matches!(at, Atom::Var(n) if vars.index(n) == v)) {
        supp[v]
    } else {
        Span::point(0)
    };
    let degree = if form.all_vars() { a.degree() } else { None };
    let terms = acc.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    Ok(FormalDistribution::from_parts(&vars, terms, supp, known, degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::EqOutcome;

    fn two_vars() -> Arc<Vars> {
        Vars::new(["x1", "x2"])
    }

    #[test]
    fn square_is_direction_independent() {
        let vars = two_vars();
        let w = Window::sym(&vars, 8);
        let a = iota_expand(&vars, &LinearForm::diff("x1", "x2"), 2, &w).unwrap();
        let b = iota_expand(&vars, &LinearForm::neg_sum("x2", "x1"), 2, &w).unwrap();
        // x1^2 - 2 x1 x2 + x2^2 either way
        assert!(a.window_equal(&b, &w).unwrap().is_equal());
        assert_eq!(a.num_terms(), 3);
        assert_eq!(
            a.coeff(&[1, 1]).unwrap(),
            Scalar::from_int(-2)
        );
    }

    #[test]
    fn geometric_series() {
        let vars = two_vars();
        let w = Window::sym(&vars, 8);
        let a = iota_expand(&vars, &LinearForm::diff("x1", "x2"), -1, &w).unwrap();
        // sum_{i>=0} x1^(-1-i) x2^i
        for i in 0..=7 {
            assert_eq!(a.coeff(&[-1 - i, i]).unwrap(), Scalar::one());
        }
        assert_eq!(a.coeff(&[-2, 0]).unwrap(), Scalar::zero());
    }

    #[test]
    fn iota_difference_is_delta() {
        let vars = two_vars();
        let w = Window::sym(&vars, 8);
        let big = w.enlarged(vars.denom() * 20);
        let a = iota_expand(&vars, &LinearForm::diff("x1", "x2"), -1, &big).unwrap();
        let b = iota_expand(&vars, &LinearForm::neg_sum("x2", "x1"), -1, &big).unwrap();
        let diff = a.sub(&b).unwrap();
        // x2^(-1) delta(x1/x2)
        let dl = delta_inv(&vars, &LinearForm::var("x1"), &LinearForm::var("x2"), &big).unwrap();
        assert_eq!(diff.window_equal(&dl, &w).unwrap(), EqOutcome::Equal);
    }

    #[test]
    fn delta_grid() {
        let vars = two_vars();
        let w = Window::sym(&vars, 6);
        let dl = delta(&vars, &LinearForm::var("x1"), &LinearForm::var("x2"), &w).unwrap();
        for n in -6..=6 {
            assert_eq!(dl.coeff(&[n, -n]).unwrap(), Scalar::one());
        }
        assert_eq!(dl.coeff(&[1, 1]).unwrap(), Scalar::zero());
    }

    #[test]
    fn x_minus_y_kills_delta() {
        let vars = two_vars();
        let w = Window::sym(&vars, 6);
        let big = w.enlarged(3 * vars.denom());
        let dl = delta(&vars, &LinearForm::var("x1"), &LinearForm::var("x2"), &big).unwrap();
        let poly = iota_expand(&vars, &LinearForm::diff("x1", "x2"), 1, &big).unwrap();
        let prod = poly.mul(&dl, &w).unwrap();
        let zero = FormalDistribution::zero(&vars);
        assert!(prod.window_equal(&zero, &w).unwrap().is_equal());
    }

    #[test]
    fn ill_defined_square_of_delta() {
        let vars = two_vars();
        let w = Window::sym(&vars, 4);
        let dl = delta(&vars, &LinearForm::var("x1"), &LinearForm::var("x2"), &w).unwrap();
        match dl.mul(&dl, &w) {
            Err(FormalError::IllDefinedProduct { .. }) => {}
            other => panic!("expected ill-defined product, got {other:?}"),
        }
    }
}
