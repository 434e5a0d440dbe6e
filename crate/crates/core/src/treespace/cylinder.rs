//! Finite unions of boundary cylinders with exact rational masses.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::TreeError;

/// A boundary with its cylinder measure: cylinders whose first step is in
/// `first` share the mass equally, and each further step divides by `q`.
///
/// [`CylSpace::visual`] is the visual measure from the base vertex; a
/// restricted first step models a quotient boundary such as `∂X₀`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylSpace {
    q: u32,
    first: Vec<u32>,
}

impl CylSpace {
    pub fn visual(q: u32) -> Self {
        CylSpace { q, first: (0..=q).collect() }
    }

    pub fn restricted(q: u32, mut first: Vec<u32>) -> Self {
        first.sort_unstable();
        first.dedup();
        assert!(!first.is_empty() && first.iter().all(|&c| c <= q));
        CylSpace { q, first }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn first_steps(&self) -> &[u32] {
        &self.first
    }

    pub fn arity(&self, pos: usize) -> u32 {
        if pos == 0 {
            self.q + 1
        } else {
            self.q
        }
    }

    /// Mass of one cylinder of the given length (length 0 is the whole space).
    pub fn cylinder_mass(&self, len: usize) -> BigRational {
        if len == 0 {
            return BigRational::one();
        }
        let den = BigInt::from(self.first.len()) * BigInt::from(self.q).pow((len - 1) as u32);
        BigRational::new(BigInt::one(), den)
    }

    /// Whether the fields describe a space (deserialized data is unchecked).
    pub fn is_valid(&self) -> bool {
        self.q >= 1 && !self.first.is_empty() && self.first.windows(2).all(|w| w[0] < w[1]) && self.first.iter().all(|&c| c <= self.q)
    }

    fn admits(&self, c: &[u32]) -> bool {
        c.is_empty() || self.first.binary_search(&c[0]).is_ok()
    }

    /// The whole space as a union of first-step cylinders.
    pub fn whole(&self) -> CylinderUnion {
        CylinderUnion { cyls: self.first.iter().map(|&c| alloc::vec![c]).collect() }
    }
}

/// Pairwise disjoint cylinders, kept sorted. The empty prefix is the whole
/// boundary.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CylinderUnion {
    cyls: Vec<Vec<u32>>,
}

fn is_prefix(a: &[u32], b: &[u32]) -> bool {
    a.len() <= b.len() && &b[..a.len()] == a
}

impl CylinderUnion {
    pub fn empty() -> Self {
        CylinderUnion { cyls: Vec::new() }
    }

    pub fn whole() -> Self {
        CylinderUnion { cyls: alloc::vec![Vec::new()] }
    }

    pub fn single(c: Vec<u32>) -> Self {
        CylinderUnion { cyls: alloc::vec![c] }
    }

    pub(crate) fn from_sorted_antichain(cyls: Vec<Vec<u32>>) -> Self {
        CylinderUnion { cyls }
    }

    /// Checks pairwise disjointness.
    pub fn new(mut cyls: Vec<Vec<u32>>) -> Result<Self, TreeError> {
        cyls.sort();
        // In sorted order a prefix is immediately followed by an extension.
        for w in cyls.windows(2) {
            if is_prefix(&w[0], &w[1]) {
                return Err(TreeError::Overlap(w[0].clone(), w[1].clone()));
            }
        }
        Ok(CylinderUnion { cyls })
    }

    /// Union of arbitrary, possibly nested, cylinders.
    pub fn union_of<I: IntoIterator<Item = Vec<u32>>>(it: I) -> Self {
        let mut all: Vec<Vec<u32>> = it.into_iter().collect();
        all.sort();
        let mut out: Vec<Vec<u32>> = Vec::with_capacity(all.len());
        for c in all {
            if let Some(last) = out.last() {
                if is_prefix(last, &c) {
                    continue;
                }
            }
            out.push(c);
        }
        CylinderUnion { cyls: out }
    }

    pub fn union(&self, o: &CylinderUnion) -> Self {
        Self::union_of(self.cyls.iter().chain(&o.cyls).cloned())
    }

    /// Ends avoiding the cylinder `c`, as siblings along its path.
    pub fn complement_of(c: &[u32], q: u32) -> Self {
        let mut out = Vec::new();
        for k in 0..c.len() {
            let arity = if k == 0 { q + 1 } else { q };
            for x in 0..arity {
                if x != c[k] {
                    let mut w = c[..k].to_vec();
                    w.push(x);
                    out.push(w);
                }
            }
        }
        out.sort();
        CylinderUnion { cyls: out }
    }

    pub fn cylinders(&self) -> &[Vec<u32>] {
        &self.cyls
    }

    pub fn len(&self) -> usize {
        self.cyls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cyls.is_empty()
    }

    /// Cylinder of `self` that contains or is contained in `c`, if any.
    fn meeting(&self, c: &[u32]) -> Option<&Vec<u32>> {
        // An ancestor of c sorts at or before c; an extension right after.
        let i = self.cyls.partition_point(|x| x.as_slice() < c);
        if let Some(x) = self.cyls.get(i) {
            if is_prefix(c, x) {
                return Some(x);
            }
        }
        if i > 0 && is_prefix(&self.cyls[i - 1], c) {
            return Some(&self.cyls[i - 1]);
        }
        None
    }

    /// `Ok` if disjoint, otherwise one overlapping pair.
    pub fn disjoint_from(&self, o: &CylinderUnion) -> Result<(), TreeError> {
        for c in &self.cyls {
            if let Some(x) = o.meeting(c) {
                return Err(TreeError::Overlap(c.clone(), x.clone()));
            }
        }
        Ok(())
    }

    pub fn intersect(&self, o: &CylinderUnion) -> Self {
        let mut out = Vec::new();
        for a in &self.cyls {
            let i = o.cyls.partition_point(|x| x.as_slice() < a.as_slice());
            if i > 0 && is_prefix(&o.cyls[i - 1], a) {
                out.push(a.clone());
                continue;
            }
            for b in &o.cyls[i..] {
                if !is_prefix(a, b) {
                    break;
                }
                out.push(b.clone());
            }
        }
        Self::union_of(out)
    }

    /// Whether the cylinder `c` is covered, possibly by several smaller ones.
    pub fn covers(&self, c: &[u32], q: u32) -> bool {
        let i = self.cyls.partition_point(|x| x.as_slice() < c);
        if i > 0 && is_prefix(&self.cyls[i - 1], c) {
            return true;
        }
        if self.cyls.get(i).is_some_and(|x| x.as_slice() == c) {
            return true;
        }
        if !self.cyls.get(i).is_some_and(|x| is_prefix(c, x)) {
            return false;
        }
        let arity = if c.is_empty() { q + 1 } else { q };
        (0..arity).all(|x| {
            let mut w = c.to_vec();
            w.push(x);
            self.covers(&w, q)
        })
    }

    pub fn contains(&self, o: &CylinderUnion, q: u32) -> bool {
        o.cyls.iter().all(|c| self.covers(c, q))
    }

    /// Exact mass in `space`; cylinders outside the space weigh nothing.
    pub fn mass(&self, space: &CylSpace) -> BigRational {
        let mut by_len: BTreeMap<usize, u64> = BTreeMap::new();
        let mut total = BigRational::zero();
        for c in &self.cyls {
            if c.is_empty() {
                return BigRational::one();
            }
            if space.admits(c) {
                *by_len.entry(c.len()).or_default() += 1;
            }
        }
        for (len, n) in by_len {
            total += space.cylinder_mass(len) * BigRational::from_integer(BigInt::from(n));
        }
        total
    }
}
