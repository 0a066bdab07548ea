//! Mode actions a_n u on the concrete instances.
//!
//! Generator modes (the weight-one boson and the lattice charge shifts) act
//! through closed kernels; every composite state acts through the iterate
//! recursion
//!
//!   (g_m b)_n = sum_i (-1)^i C(m,i) (g_{m-i} b_{n+i} - (-1)^m b_{m+n-i} g_i)
//!
//! peeled one creation operator at a time, so there is a single code path
//! from the Jacobi identity down to the kernels. Results are memoized per
//! (algebra, module) pair; the tables are behind an RwLock and inserts are
//! idempotent.

use crate::cocycle::Cocycle;
use crate::error::VoaError;
use crate::space::{BasisKey, Space, State};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use voa_formal::{binom_scalar, factorial, Scalar};

/// Mode-action engine for one algebra acting on one module (possibly
/// itself).
pub struct Kernel {
    pub alg: Arc<Space>,
    pub module: Arc<Space>,
    pub cocycle: Cocycle,
    memo: RwLock<HashMap<(BasisKey, i64, BasisKey), State>>,
}

impl Kernel {
    pub fn new(alg: &Arc<Space>, module: &Arc<Space>) -> Result<Arc<Kernel>, VoaError> {
        Self::with_cocycle(alg, module, Cocycle::standard())
    }

    pub fn with_cocycle(
        alg: &Arc<Space>,
        module: &Arc<Space>,
        cocycle: Cocycle,
    ) -> Result<Arc<Kernel>, VoaError> {
        if !alg.is_algebra() {
            return Err(VoaError::MixedInstances(
                "left operand space is not a vertex operator algebra".into(),
            ));
        }
        if !alg.same_family(module) {
            return Err(VoaError::MixedInstances(format!(
                "{:?} does not act on {:?}",
                alg.kind, module.kind
            )));
        }
        Ok(Arc::new(Kernel {
            alg: alg.clone(),
            module: module.clone(),
            cocycle,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    /// a_n u, exact, with truncation reported as an error.
    pub fn mode(&self, a: &State, n: i64, u: &State) -> Result<State, VoaError> {
        if !Arc::ptr_eq(&a.space, &self.alg) {
            return Err(VoaError::MixedInstances("state not from this algebra".into()));
        }
        let mut out = State::zero(&self.module);
        for (ka, ca) in &a.terms {
            for (ku, cu) in &u.terms {
                let r = self.mode_basis(ka, n, ku)?;
                out.add_scaled(&r, &(ca * cu));
            }
        }
        Ok(out)
    }

    /// Mode action on basis monomials, memoized.
    pub fn mode_basis(&self, a: &BasisKey, n: i64, u: &BasisKey) -> Result<State, VoaError> {
        // a_n u vanishes below the module floor; above the ceiling it is a
        // truncation error
        let out_depth = self.alg.depth_of(a) + self.module.depth_of(u) - n - 1;
        if out_depth < 0 {
            return Ok(State::zero(&self.module));
        }
        self.module.check_depth(out_depth)?;

        let key = (a.clone(), n, u.clone());
        if let Some(hit) = self.memo.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = self.mode_uncached(a, n, u)?;
        self.memo
            .write()
            .unwrap()
            .entry(key)
            .or_insert_with(|| result.clone());
        Ok(result)
    }

    fn mode_uncached(&self, a: &BasisKey, n: i64, u: &BasisKey) -> Result<State, VoaError> {
        // vacuum: Y(1,x) = 1
        if a.parts.is_empty() && a.charge == 0 {
            return Ok(if n == -1 {
                State::basis(&self.module, u.clone())
            } else {
                State::zero(&self.module)
            });
        }
        // the weight-one boson alpha(-1)|0>
        if a.parts == [1] && a.charge == 0 {
            return self.alpha_mode(n, u);
        }
        // pure charge +-2 (e^{+-alpha}) acts through the exponential kernel
        if a.parts.is_empty() && a.charge.abs() == 2 {
            return self.exp_mode(a.charge / 2, n, u);
        }
        // composite: peel one creation operator
        if let Some(&p) = a.parts.first() {
            // a = alpha(-p) b exactly, creations commute
            let b = BasisKey { parts: a.parts[1..].to_vec(), charge: a.charge };
            let g = BasisKey::boson(&[1]);
            self.iterate(&g, -(p as i64), &b, n, u)
        } else {
            // |s delta| >= 4: a = eps^{-1} (e^{sign alpha})_N e^{(s-2 sign) delta}
            let s = a.charge;
            let sig = s.signum();
            let g = BasisKey::charged(&[], 2 * sig);
            let b = BasisKey::charged(&[], s - 2 * sig);
            // <sig alpha, (s - 2 sig) delta> = sig (s - 2 sig) kappa / 2
            let pairing = sig * (s - 2 * sig) * self.alg.kappa / 2;
            let m = -pairing - 1;
            let eps = self.cocycle.eps(2 * sig, s - 2 * sig);
            let raw = self.iterate(&g, m, &b, n, u)?;
            Ok(raw.scale(&eps.inv()))
        }
    }

    /// (g_m b)_n u by the iterate recursion.
    fn iterate(&self, g: &BasisKey, m: i64, b: &BasisKey, n: i64, u: &BasisKey) -> Result<State, VoaError> {
        let mut out = State::zero(&self.module);
        let sign_m = if m % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
        let du = self.module.depth_of(u);
        let db = self.alg.depth_of(b);
        let dg = self.alg.depth_of(g);
        let mut i: i64 = 0;
        loop {
            // first branch: g_{m-i} (b_{n+i} u); dies once b_{n+i} u = 0
            let b_depth = db + du - (n + i) - 1;
            // second branch: b_{m+n-i} (g_i u); dies once g_i u = 0
            let g_depth = dg + du - i - 1;
            if b_depth < 0 && g_depth < 0 {
                break;
            }
            let coef = binom_scalar(m, i as u64);
            if !coef.is_zero() {
                let sign_i = if i % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
                let c = &coef * &sign_i;
                if b_depth >= 0 {
                    let inner = self.mode_basis(b, n + i, u)?;
                    for (k, x) in &inner.terms {
                        let outer = self.mode_basis(g, m - i, k)?;
                        out.add_scaled(&outer, &(&c * x));
                    }
                }
                if g_depth >= 0 {
                    let inner = self.mode_basis(g, i, u)?;
                    let c2 = &(&c * &sign_m).pow(1) * &Scalar::from_int(-1);
                    for (k, x) in &inner.terms {
                        let outer = self.mode_basis(b, m + n - i, k)?;
                        out.add_scaled(&outer, &(&c2 * x));
                    }
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// alpha(n) on a basis monomial.
    fn alpha_mode(&self, n: i64, u: &BasisKey) -> Result<State, VoaError> {
        let mut out = State::zero(&self.module);
        if n < 0 {
            let mut parts = u.parts.clone();
            parts.push((-n) as u32);
            parts.sort_unstable_by(|a, b| b.cmp(a));
            out.add_term(BasisKey { parts, charge: u.charge }, Scalar::one());
        } else if n == 0 {
            let c = self.module.alpha0(u);
            out.add_term(u.clone(), c);
        } else {
            // [alpha(n), alpha(-n)] = n kappa
            let mult = u.parts.iter().filter(|&&p| p as i64 == n).count() as i64;
            if mult > 0 {
                let mut parts = u.parts.clone();
                let pos = parts.iter().position(|&p| p as i64 == n).unwrap();
                parts.remove(pos);
                out.add_term(
                    BasisKey { parts, charge: u.charge },
                    Scalar::from_int(n * self.alg.kappa * mult),
                );
            }
        }
        Ok(out)
    }

    /// (e^{m alpha})_n for m = +-1 via Y(e^{m alpha}, x) =
    /// E^-(-m alpha, x) E^+(-m alpha, x) e_{m alpha} x^{m alpha(0)}.
    fn exp_mode(&self, m: i64, n: i64, u: &BasisKey) -> Result<State, VoaError> {
        debug_assert!(m.abs() == 1);
        let kappa = self.alg.kappa;
        // x^{<m alpha, charge delta>} = x^{m s kappa / 2}
        let p0 = m * u.charge * kappa / 2;
        let eps = self.cocycle.eps(2 * m, u.charge);
        let new_charge = u.charge + 2 * m;

        // E^+(-m alpha, x) u: annihilation exponential
        // exp(sum_{k>0} (-m alpha(k)/k) x^{-k}) as a polynomial in x^{-1}
        // acting on the partition; each alpha(k) removes a part k with
        // coefficient k kappa (times remaining multiplicity).
        let mut eplus: Vec<(i64, Vec<u32>, Scalar)> = vec![(0, u.parts.clone(), Scalar::one())];
        // distinct parts of u
        let mut distinct: Vec<u32> = u.parts.clone();
        distinct.dedup();
        for &k in &distinct {
            let mult = u.parts.iter().filter(|&&p| p == k).count() as i64;
            let mut next: Vec<(i64, Vec<u32>, Scalar)> = Vec::new();
            for (xpow, parts, coef) in &eplus {
                // apply alpha(k) j times
                let mut falling = BigInt::from(1);
                for j in 0..=mult {
                    if j > 0 {
                        let remaining = mult - (j - 1);
                        falling *= BigInt::from(remaining) * BigInt::from(k as i64 * kappa);
                    }
                    // (-m/k)^j / j!
                    let base = BigRational::new(BigInt::from(-m), BigInt::from(k as i64));
                    let c = Scalar::from_big(
                        base.pow(j as i32) * BigRational::new(falling.clone(), factorial(j as u64)),
                    );
                    let mut parts2 = parts.clone();
                    for _ in 0..j {
                        let pos = parts2.iter().position(|&p| p == k).unwrap();
                        parts2.remove(pos);
                    }
                    next.push((xpow - (k as i64) * j, parts2, &c * coef));
                }
            }
            eplus = next;
        }

        // assemble: for each E^+ branch, multiply by x^{p0}, shift charge,
        // then bring in the E^- coefficient of the missing power of x
        let mut out = State::zero(&self.module);
        for (xpow, parts, coef) in eplus {
            if coef.is_zero() {
                continue;
            }
            // need total power -n-1: E^- contributes M = -n-1 - xpow - p0
            let need = -n - 1 - xpow - p0;
            if need < 0 {
                continue;
            }
            // E^-(-m alpha, x) = exp(sum_{k>0} (m alpha(-k)/k) x^k): the
            // coefficient of x^need is a sum over partitions of need
            for mu in super::space_partitions(need as u32) {
                let mut c = coef.clone();
                let mut parts2 = parts.clone();
                // multiplicity bookem: product over parts of mu
                let mut k_iter = mu.iter().peekable();
                while let Some(&k) = k_iter.next() {
                    let mut count = 1u64;
                    while k_iter.peek() == Some(&&k) {
                        k_iter.next();
                        count += 1;
                    }
                    // (m/k)^count / count!
                    let base = BigRational::new(BigInt::from(m), BigInt::from(k as i64));
                    c = &c
                        * &Scalar::from_big(
                            base.pow(count as i32)
                                * BigRational::new(BigInt::from(1), factorial(count)),
                        );
                    for _ in 0..count {
                        parts2.push(k);
                    }
                }
                parts2.sort_unstable_by(|a, b| b.cmp(a));
                out.add_term(BasisKey { parts: parts2, charge: new_charge }, &c * &eps);
            }
        }
        Ok(out)
    }
}

/// L(m) u through the conformal vector of the instance.
pub fn conformal_vector(alg: &Arc<Space>) -> State {
    // omega = (1 / 2 kappa) alpha(-1)^2 |0>
    let mut s = State::zero(alg);
    s.add_term(
        BasisKey::boson(&[1, 1]),
        Scalar::from_big(BigRational::new(BigInt::from(1), BigInt::from(2 * alg.kappa))),
    );
    s
}

impl Kernel {
    pub fn virasoro(&self, m: i64, u: &State) -> Result<State, VoaError> {
        let omega = conformal_vector(&self.alg);
        self.mode(&omega, m + 1, u)
    }

    /// The rank (central charge): 2 omega_3 omega as a scalar multiple of 1.
    pub fn rank(&self) -> Result<Scalar, VoaError> {
        let omega = conformal_vector(&self.alg);
        let v = self.mode(&omega, 3, &omega)?;
        let vac = BasisKey::vacuum();
        let c = v.terms.get(&vac).cloned().unwrap_or_else(Scalar::zero);
        Ok(&c * &Scalar::from_int(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis(d: u32) -> (Arc<Space>, Arc<Kernel>) {
        let v = Space::heisenberg_voa(d);
        let k = Kernel::new(&v, &v).unwrap();
        (v, k)
    }

    #[test]
    fn boson_pairing_normalization() {
        let (v, k) = heis(8);
        let b = State::basis(&v, BasisKey::boson(&[1]));
        // b_1 b = <a,a> |0> = |0>
        let r = k.mode(&b, 1, &b).unwrap();
        assert_eq!(r, State::vacuum(&v));
        assert!(k.mode(&b, 0, &b).unwrap().is_zero());
        assert!(k.mode(&b, 2, &b).unwrap().is_zero());
        // b_{-1} b = alpha(-1)^2 |0>
        let r = k.mode(&b, -1, &b).unwrap();
        assert_eq!(r, State::basis(&v, BasisKey::boson(&[1, 1])));
    }

    #[test]
    fn vacuum_is_identity() {
        let (v, k) = heis(6);
        let one = State::vacuum(&v);
        let u = State::basis(&v, BasisKey::boson(&[3, 2]));
        for n in -4..4 {
            let r = k.mode(&one, n, &u).unwrap();
            if n == -1 {
                assert_eq!(r, u);
            } else {
                assert!(r.is_zero(), "1_{n} u should vanish");
            }
        }
    }

    #[test]
    fn virasoro_weight_and_translation() {
        let (v, k) = heis(8);
        let b = State::basis(&v, BasisKey::boson(&[1]));
        // L(0) alpha(-1)|0> = alpha(-1)|0>
        let r = k.virasoro(0, &b).unwrap();
        assert_eq!(r, b);
        // L(-1)|0> = 0
        let r = k.virasoro(-1, &State::vacuum(&v)).unwrap();
        assert!(r.is_zero());
        // rank of the one-boson algebra is 1
        assert_eq!(k.rank().unwrap(), Scalar::one());
        // [L(2), L(-2)]|0> = (1/2)|0> for c = 1
        let vac = State::vacuum(&v);
        let l_m2 = k.virasoro(-2, &vac).unwrap();
        let lhs = k.virasoro(2, &l_m2).unwrap();
        assert_eq!(lhs, vac.scale(&Scalar::from_ratio(1, 2)));
    }

    #[test]
    fn lattice_sl2_relations() {
        let v = Space::lattice_voa(8);
        let k = Kernel::new(&v, &v).unwrap();
        let e = State::basis(&v, BasisKey::charged(&[], 2));
        let f = State::basis(&v, BasisKey::charged(&[], -2));
        let h = State::basis(&v, BasisKey::boson(&[1]));
        // e_1 f = |0>, e_0 f = alpha(-1)|0>, e_2 f = 0
        assert_eq!(k.mode(&e, 1, &f).unwrap(), State::vacuum(&v));
        assert_eq!(k.mode(&e, 0, &f).unwrap(), h);
        assert!(k.mode(&e, 2, &f).unwrap().is_zero());
        // h_0 e = <alpha, alpha> e = 2 e
        assert_eq!(k.mode(&h, 0, &e).unwrap(), e.scale(&Scalar::from_int(2)));
        // e_0 e = 0 (x^2 prefactor)
        assert!(k.mode(&e, 0, &e).unwrap().is_zero());
        // rank of the lattice algebra is 1
        assert_eq!(k.rank().unwrap(), Scalar::one());
    }

    #[test]
    fn frozen_exponential_coefficient() {
        // (e^alpha)_{-2} e^{-alpha} = (1/2)(alpha(-1)^2 + alpha(-2))|0>
        let v = Space::lattice_voa(8);
        let k = Kernel::new(&v, &v).unwrap();
        let e = State::basis(&v, BasisKey::charged(&[], 2));
        let f = State::basis(&v, BasisKey::charged(&[], -2));
        let r = k.mode(&e, -2, &f).unwrap();
        let mut expect = State::zero(&v);
        expect.add_term(BasisKey::boson(&[1, 1]), Scalar::from_ratio(1, 2));
        expect.add_term(BasisKey::boson(&[2]), Scalar::from_ratio(1, 2));
        assert_eq!(r, expect);
    }
}
