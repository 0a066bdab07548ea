//! Exact scalars: rationals, optionally extended by a root of unity.
//!
//! Everything downstream assumes exact arithmetic, so a scalar is either a
//! `BigRational` or an element of Q(zeta_N) for N a power of two (N >= 4),
//! stored on the power basis 1, zeta, ..., zeta^(N/2 - 1) with the single
//! reduction zeta^(N/2) = -1. Powers of two are all we need: the phases
//! e^(pi i h) that show up in transpose/adjoint formulas have h with a
//! power-of-two denominator here.
//!
//! Arithmetic normalizes aggressively: a cyclotomic value whose nonconstant
//! coordinates vanish collapses back to `Rat`, and an order-2N value
//! supported on even powers collapses to order N. Equality is therefore
//! structural.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// An exact scalar in Q or Q(zeta_N), N a power of two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    /// Coefficients of 1, zeta, ..., zeta^(order/2 - 1); at least one of the
    /// coefficients with odd index (order 4) or index not divisible by
    /// order/4 (larger orders) is nonzero, otherwise the value would have
    /// been reduced.
    Cyc { order: u32, coeffs: Vec<BigRational> },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Scalar::Rat(r)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Cyc { .. } => false, // normalized form is never all-zero
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    /// The rational part if this scalar is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Cyc { .. } => None,
        }
    }

    /// e^(pi i h) for rational h. The reduced denominator of h must be a
    /// power of two.
    pub fn e_pi_i(h: &BigRational) -> Self {
        // e^(pi i p/q) = zeta_{2q}^p
        let p = h.numer().clone();
        let q = h.denom().clone(); // > 0, coprime to p
        let q_u: u64 = (&q).try_into().expect("denominator too large");
        assert!(q_u.is_power_of_two(), "phase denominator must be a power of two");
        let order = (2 * q_u).max(4) as u32;
        // exponent of zeta_order: p * (order / 2q)
        let step = BigInt::from(order as u64 / (2 * q_u));
        let exp = p * step;
        let exp = exp.mod_floor_u32(order);
        Self::zeta_pow(order, exp)
    }

    /// zeta_order^k as a normalized scalar.
    pub fn zeta_pow(order: u32, k: u32) -> Self {
        assert!(order >= 4 && order.is_power_of_two());
        let half = (order / 2) as usize;
        let k = (k % order) as usize;
        let mut coeffs = vec![BigRational::zero(); half];
        if k < half {
            coeffs[k] = BigRational::one();
        } else {
            coeffs[k - half] = -BigRational::one();
        }
        normalize(order, coeffs)
    }

    fn to_order(&self, order: u32) -> Vec<BigRational> {
        let half = (order / 2) as usize;
        let mut out = vec![BigRational::zero(); half];
        match self {
            Scalar::Rat(r) => out[0] = r.clone(),
            Scalar::Cyc { order: o, coeffs } => {
                let step = (order / o) as usize;
                for (j, c) in coeffs.iter().enumerate() {
                    out[j * step] = c.clone();
                }
            }
        }
        out
    }

    fn order(&self) -> u32 {
        match self {
            Scalar::Rat(_) => 1,
            Scalar::Cyc { order, .. } => *order,
        }
    }

    /// Galois conjugate zeta -> zeta^k, k odd.
    fn galois(&self, k: u32) -> Self {
        match self {
            Scalar::Rat(_) => self.clone(),
            Scalar::Cyc { order, coeffs } => {
                let n = *order;
                let half = (n / 2) as usize;
                let mut out = vec![BigRational::zero(); half];
                for (j, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let e = ((j as u32) * k) % n;
                    if (e as usize) < half {
                        out[e as usize] += c;
                    } else {
                        out[e as usize - half] -= c;
                    }
                }
                normalize(n, out)
            }
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        match self {
            Scalar::Rat(r) => {
                assert!(!r.is_zero(), "division by zero");
                Scalar::Rat(r.recip())
            }
            Scalar::Cyc { order, .. } => {
                // product of the other Galois conjugates, divided by the norm;
                // the units of Z/n for n a power of two are the odd residues
                let n = *order;
                let mut prod = Scalar::one();
                for k in (3..n).step_by(2) {
                    prod = &prod * &self.galois(k);
                }
                let norm = self * &prod;
                let r = norm
                    .as_rational()
                    .expect("field norm must be rational")
                    .clone();
                assert!(!r.is_zero(), "division by zero");
                &prod * &Scalar::Rat(r.recip())
            }
        }
    }

    /// Integer power, negative allowed for invertible scalars.
    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

trait ModFloor {
    fn mod_floor_u32(&self, m: u32) -> u32;
}

impl ModFloor for BigInt {
    fn mod_floor_u32(&self, m: u32) -> u32 {
        let m_big = BigInt::from(m);
        let mut r = self % &m_big;
        if r.is_negative() {
            r += &m_big;
        }
        let v: u64 = (&r).try_into().unwrap();
        v as u32
    }
}

fn normalize(order: u32, mut coeffs: Vec<BigRational>) -> Scalar {
    let mut order = order;
    loop {
        if order == 4 {
            if coeffs[1].is_zero() {
                return Scalar::Rat(std::mem::take(&mut coeffs[0]));
            }
            return Scalar::Cyc { order, coeffs };
        }
        // reducible to order/2 when only even powers of zeta occur
        if coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero()) {
            coeffs = coeffs.into_iter().step_by(2).collect();
            order /= 2;
        } else {
            return Scalar::Cyc { order, coeffs };
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let order = self.order().max(rhs.order()).max(4);
                let mut a = self.to_order(order);
                let b = rhs.to_order(order);
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                normalize(order, a)
            }
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Rat(a), Scalar::Cyc { order, coeffs }) | (Scalar::Cyc { order, coeffs }, Scalar::Rat(a)) => {
                if a.is_zero() {
                    return Scalar::zero();
                }
                let out = coeffs.iter().map(|c| c * a).collect();
                normalize(*order, out)
            }
            _ => {
                let order = self.order().max(rhs.order());
                let a = self.to_order(order);
                let b = rhs.to_order(order);
                let half = (order / 2) as usize;
                let mut out = vec![BigRational::zero(); half];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let e = i + j;
                        let p = x * y;
                        if e < half {
                            out[e] += p;
                        } else {
                            out[e - half] -= p;
                        }
                    }
                }
                normalize(order, out)
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Cyc { order, coeffs } => Scalar::Cyc {
                order: *order,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", r),
            Scalar::Cyc { order, coeffs } => {
                let mut first = true;
                for (j, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if j == 0 {
                        write!(f, "{}", c)?;
                    } else if c.is_one() {
                        write!(f, "z{}^{}", order, j)?;
                    } else {
                        write!(f, "({})*z{}^{}", c, order, j)?;
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

/// Binomial coefficient with arbitrary integer top argument.
pub fn binomial(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n) - BigInt::from(i);
    }
    let mut den = BigInt::one();
    for i in 1..=k {
        den *= BigInt::from(i);
    }
    num / den
}

/// binomial(n, k) as a scalar.
pub fn binom_scalar(n: i64, k: u64) -> Scalar {
    Scalar::Rat(BigRational::from_integer(binomial(n, k)))
}

/// k! as a BigInt.
pub fn factorial(k: u64) -> BigInt {
    let mut out = BigInt::one();
    for i in 2..=k {
        out *= BigInt::from(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn phase_squares() {
        // e^(pi i / 2) = i, squares to -1
        let i = Scalar::e_pi_i(&rat(1, 2));
        assert_eq!(&i * &i, Scalar::from_int(-1));
        // e^(pi i) = -1 collapses to a rational
        assert_eq!(Scalar::e_pi_i(&rat(1, 1)), Scalar::from_int(-1));
        assert_eq!(Scalar::e_pi_i(&rat(2, 1)), Scalar::from_int(1));
        // e^(pi i / 4)^8 = 1 in Q(zeta_8)
        let z = Scalar::e_pi_i(&rat(1, 4));
        assert_eq!(z.pow(8), Scalar::one());
        assert_eq!(z.pow(4), Scalar::from_int(-1));
    }

    #[test]
    fn cyclotomic_inverse() {
        let z = Scalar::e_pi_i(&rat(1, 4));
        let x = &(&Scalar::from_int(3) * &z) + &Scalar::from_ratio(1, 2);
        assert_eq!(&x * &x.inv(), Scalar::one());
        let i = Scalar::e_pi_i(&rat(1, 2));
        assert_eq!(i.inv(), i.pow(3));
    }

    #[test]
    fn order_reduction() {
        // zeta_8^2 = i should normalize down to order 4
        let z = Scalar::zeta_pow(8, 2);
        let i = Scalar::zeta_pow(4, 1);
        assert_eq!(z, i);
        // zeta_8^4 = -1
        assert_eq!(Scalar::zeta_pow(8, 4), Scalar::from_int(-1));
    }

    #[test]
    fn negative_binomial() {
        // (-1 choose k) = (-1)^k
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(-1, 4), BigInt::from(1));
        // (-2 choose 2) = 3
        assert_eq!(binomial(-2, 2), BigInt::from(3));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }
}
