//! Truncated graded spaces for the concrete instances.
//!
//! Every instance here is a free-boson Fock space, possibly decorated with
//! lattice charge: the rank-one Heisenberg algebra M(1) and its modules
//! M(1,lambda), and the rank-one even lattice algebra V_L with its coset
//! module. A basis vector is a partition alpha(-n_1)...alpha(-n_k) applied
//! to a charge vacuum. Charges are counted in units of half the lattice
//! generator, so the algebra lives on even charges and the coset module on
//! odd ones.
//!
//! All gradings are handled through depths: weight = h0 + depth with h0 the
//! lowest weight, so mode arithmetic stays integral even on the quarter-
//! weight lattice coset.

use crate::error::VoaError;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use voa_formal::Scalar;

/// A basis monomial: a partition (sorted descending) on a charge vacuum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey {
    /// alpha(-p) factors, p >= 1, sorted descending.
    pub parts: Vec<u32>,
    /// Lattice point in units of alpha/2; always 0 for Heisenberg spaces.
    pub charge: i64,
}

impl BasisKey {
    pub fn vacuum() -> BasisKey {
        BasisKey { parts: Vec::new(), charge: 0 }
    }

    pub fn boson(parts: &[u32]) -> BasisKey {
        let mut parts = parts.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        BasisKey { parts, charge: 0 }
    }

    pub fn charged(parts: &[u32], charge: i64) -> BasisKey {
        let mut parts = parts.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        BasisKey { parts, charge }
    }

    pub fn parts_sum(&self) -> i64 {
        self.parts.iter().map(|&p| p as i64).sum()
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.parts {
            write!(f, "a(-{p})")?;
        }
        if self.charge == 0 {
            write!(f, "|0>")
        } else if self.charge % 2 == 0 {
            write!(f, "|{}a>", self.charge / 2)
        } else {
            write!(f, "|{}/2 a>", self.charge)
        }
    }
}

/// Which concrete space this is.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    /// M(1), the rank-one Heisenberg vertex operator algebra, <a,a> = 1.
    HeisenbergVoa,
    /// M(1,lambda) with alpha(0) acting as lambda.
    HeisenbergModule { lambda: BigRational },
    /// V_L for L = Z alpha, <alpha,alpha> = 2; even charges.
    LatticeVoa,
    /// V_{L + alpha/2}; odd charges, lowest weight 1/4.
    LatticeModule,
}

/// A truncated graded instance with an enumerated canonical basis.
#[derive(Debug)]
pub struct Space {
    pub kind: SpaceKind,
    /// <alpha, alpha>.
    pub kappa: i64,
    /// Maximum stored depth (weight minus lowest weight).
    pub max_depth: u32,
    /// Lowest weight h0.
    pub h0: BigRational,
    basis: Vec<Vec<BasisKey>>,
    index: HashMap<BasisKey, (u32, usize)>,
}

fn partitions_of(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        let mut p = max.min(n);
        while p >= 1 {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
            if p == 1 {
                break;
            }
            p -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, n.max(1), &mut Vec::new(), &mut out);
    out
}

impl Space {
    pub fn heisenberg_voa(max_depth: u32) -> Arc<Space> {
        Space::build(SpaceKind::HeisenbergVoa, 1, max_depth)
    }

    pub fn heisenberg_module(lambda: BigRational, max_depth: u32) -> Arc<Space> {
        Space::build(SpaceKind::HeisenbergModule { lambda }, 1, max_depth)
    }

    pub fn lattice_voa(max_depth: u32) -> Arc<Space> {
        Space::build(SpaceKind::LatticeVoa, 2, max_depth)
    }

    pub fn lattice_module(max_depth: u32) -> Arc<Space> {
        Space::build(SpaceKind::LatticeModule, 2, max_depth)
    }

    fn build(kind: SpaceKind, kappa: i64, max_depth: u32) -> Arc<Space> {
        let h0 = match &kind {
            SpaceKind::HeisenbergVoa | SpaceKind::LatticeVoa => BigRational::from_integer(0.into()),
            SpaceKind::HeisenbergModule { lambda } => lambda * lambda / BigRational::from_integer(2.into()),
            SpaceKind::LatticeModule => BigRational::new(BigInt::from(1), BigInt::from(4)),
        };
        let mut basis: Vec<Vec<BasisKey>> = Vec::with_capacity(max_depth as usize + 1);
        for d in 0..=max_depth {
            let mut at_depth = Vec::new();
            let charges: Vec<i64> = match &kind {
                SpaceKind::HeisenbergVoa | SpaceKind::HeisenbergModule { .. } => vec![0],
                SpaceKind::LatticeVoa => {
                    // charge 2m has weight m^2 = s^2/4
                    let mut cs = Vec::new();
                    let mut s: i64 = 0;
                    loop {
                        let w = s * s / 4;
                        if w > d as i64 {
                            break;
                        }
                        cs.push(s);
                        if s != 0 {
                            cs.push(-s);
                        }
                        s += 2;
                    }
                    cs
                }
                SpaceKind::LatticeModule => {
                    // charge s odd has depth (s^2 - 1)/4
                    let mut cs = Vec::new();
                    let mut s: i64 = 1;
                    loop {
                        let w = (s * s - 1) / 4;
                        if w > d as i64 {
                            break;
                        }
                        cs.push(s);
                        cs.push(-s);
                        s += 2;
                    }
                    cs
                }
            };
            let mut charges = charges;
            charges.sort_unstable();
            for s in charges {
                let charge_depth = match &kind {
                    SpaceKind::LatticeVoa => s * s / 4,
                    SpaceKind::LatticeModule => (s * s - 1) / 4,
                    _ => 0,
                } as u32;
                if charge_depth > d {
                    continue;
                }
                for parts in partitions_of(d - charge_depth) {
                    at_depth.push(BasisKey { parts, charge: s });
                }
            }
            at_depth.sort();
            basis.push(at_depth);
        }
        let mut index = HashMap::new();
        for (d, at_depth) in basis.iter().enumerate() {
            for (i, k) in at_depth.iter().enumerate() {
                index.insert(k.clone(), (d as u32, i));
            }
        }
        Arc::new(Space { kind, kappa, max_depth, h0, basis, index })
    }

    pub fn dim_at(&self, depth: u32) -> usize {
        self.basis.get(depth as usize).map_or(0, |b| b.len())
    }

    pub fn basis_at(&self, depth: u32) -> &[BasisKey] {
        &self.basis[depth as usize]
    }

    /// Depth of a basis key in this space (independent of truncation).
    pub fn depth_of(&self, key: &BasisKey) -> i64 {
        let charge_depth = match &self.kind {
            SpaceKind::LatticeVoa => key.charge * key.charge / 4,
            SpaceKind::LatticeModule => (key.charge * key.charge - 1) / 4,
            _ => 0,
        };
        key.parts_sum() + charge_depth
    }

    pub fn weight_of_key(&self, key: &BasisKey) -> BigRational {
        &self.h0 + BigRational::from_integer(self.depth_of(key).into())
    }

    pub fn position(&self, key: &BasisKey) -> Option<(u32, usize)> {
        self.index.get(key).copied()
    }

    /// alpha(0) eigenvalue on a basis key.
    pub fn alpha0(&self, key: &BasisKey) -> Scalar {
        match &self.kind {
            SpaceKind::HeisenbergVoa => Scalar::zero(),
            SpaceKind::HeisenbergModule { lambda } => Scalar::from_big(lambda.clone()),
            // <alpha, s delta> = s kappa / 2
            SpaceKind::LatticeVoa | SpaceKind::LatticeModule => {
                Scalar::from_big(BigRational::new(
                    BigInt::from(key.charge * self.kappa),
                    BigInt::from(2),
                ))
            }
        }
    }

    /// Whether `other` is a module over the same family as this algebra.
    pub fn same_family(&self, other: &Space) -> bool {
        self.kappa == other.kappa
            && match (&self.kind, &other.kind) {
                (SpaceKind::HeisenbergVoa, SpaceKind::HeisenbergVoa)
                | (SpaceKind::HeisenbergVoa, SpaceKind::HeisenbergModule { .. })
                | (SpaceKind::LatticeVoa, SpaceKind::LatticeVoa)
                | (SpaceKind::LatticeVoa, SpaceKind::LatticeModule) => true,
                _ => false,
            }
    }

    pub fn is_algebra(&self) -> bool {
        matches!(self.kind, SpaceKind::HeisenbergVoa | SpaceKind::LatticeVoa)
    }

    pub fn check_depth(&self, depth: i64) -> Result<u32, VoaError> {
        if depth < 0 {
            // below the lowest weight the space is zero; callers treat this
            // as annihilation, not as an error
            unreachable!("negative depths are handled by callers");
        }
        if depth > self.max_depth as i64 {
            Err(VoaError::Truncation { needed: depth, max: self.max_depth })
        } else {
            Ok(depth as u32)
        }
    }
}

/// A sparse exact vector in a `Space`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub space: Arc<Space>,
    pub terms: BTreeMap<BasisKey, Scalar>,
}

impl State {
    pub fn zero(space: &Arc<Space>) -> State {
        State { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn basis(space: &Arc<Space>, key: BasisKey) -> State {
        let mut terms = BTreeMap::new();
        terms.insert(key, Scalar::one());
        State { space: space.clone(), terms }
    }

    pub fn vacuum(space: &Arc<Space>) -> State {
        // lowest-weight vector; only meaningful for spaces with a one
        // dimensional bottom
        let key = space.basis_at(0)[0].clone();
        State::basis(space, key)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: BasisKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn add_assign(&mut self, other: &State) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &State, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, x) in &other.terms {
            self.add_term(k.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> State {
        if c.is_zero() {
            return State::zero(&self.space);
        }
        State {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> State {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, other: &State) -> State {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    /// The depth when all terms agree, None for 0 or mixed states.
    pub fn depth(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|k| self.space.depth_of(k));
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Maximum depth over the terms, 0 for the zero state.
    pub fn max_term_depth(&self) -> i64 {
        self.terms
            .keys()
            .map(|k| self.space.depth_of(k))
            .max()
            .unwrap_or(0)
    }

    pub fn weight(&self) -> Option<BigRational> {
        self.depth()
            .map(|d| &self.space.h0 + BigRational::from_integer(d.into()))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{k}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_dims_are_partition_counts() {
        let v = Space::heisenberg_voa(8);
        let expect = [1usize, 1, 2, 3, 5, 7, 11, 15, 22];
        for (d, &e) in expect.iter().enumerate() {
            assert_eq!(v.dim_at(d as u32), e, "depth {d}");
        }
    }

    #[test]
    fn lattice_voa_dims() {
        let v = Space::lattice_voa(6);
        // depth d: partitions at charge 0 plus charges +/-2m with m^2 <= d
        // d=0: 1; d=1: p(1) + 2 p(0) = 3; d=2: p(2)+2p(1) = 4;
        // d=3: p(3)+2p(2) = 7; d=4: p(4)+2p(3)+2p(0) = 13
        assert_eq!(v.dim_at(0), 1);
        assert_eq!(v.dim_at(1), 3);
        assert_eq!(v.dim_at(2), 4);
        assert_eq!(v.dim_at(3), 7);
        assert_eq!(v.dim_at(4), 13);
    }

    #[test]
    fn lattice_module_dims() {
        let m = Space::lattice_module(3);
        // depth d: charges +/-1 with partitions of d, charges +/-3 from depth 2
        assert_eq!(m.dim_at(0), 2);
        assert_eq!(m.dim_at(1), 2);
        assert_eq!(m.dim_at(2), 6);
        assert_eq!(m.dim_at(3), 8);
    }
}
