//! Regular trees, their boundaries and boundary measures.
//!
//! All geometry is done on *path codes*: a vertex is the sequence of steps
//! from a fixed base vertex `x₀`, and a boundary point is an infinite such
//! sequence. In a `(q+1)`-regular tree the first step has `q+1` choices and
//! every later step `q` (no backtracking). Two concrete models translate
//! their native objects to codes:
//!
//! * [`bt`]: the Bruhat–Tits tree of 𝔽_q((X⁻¹)), vertices are balls and the
//!   boundary is 𝔽_q((X⁻¹)) ∪ {∞};
//! * [`cayley`]: the Cayley tree of the free group `F_k` (`q = 2k − 1`).
//!
//! Boundary points are pulled step by step; every predicate that compares two
//! of them takes a depth cap and treats agreement through the cap as equality.

pub mod bt;
pub mod cayley;
mod code;
mod cylinder;
pub mod sample;

pub use code::{
    busemann, closest_point, d_c, gromov_ends, gromov_vertex_end, line_distance, line_gap, neighbors, ray_lcp, ray_point, shadow,
    thicken, ConvexSub, PeriodicRay, Ray, Vertex,
};
pub use cylinder::{CylSpace, CylinderUnion};

use core::cmp::Ordering;
use core::fmt;

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Default number of steps pulled from a boundary point before two points are
/// declared equal.
pub const DEFAULT_DEPTH: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("boundary point lies in the boundary of the convex set")]
    ProjectionAtInfinity,
    #[error("cylinders {0:?} and {1:?} overlap")]
    Overlap(Vec<u32>, Vec<u32>),
    #[error("invalid step {code} at position {pos} for branching {q}")]
    BadCode { pos: usize, code: u32, q: u32 },
    #[error("subtree is empty or not connected")]
    BadSubtree,
    #[error("line endpoints coincide")]
    DegenerateLine,
    #[error("ε exponent {0}/2 is not a value of the distance-like map")]
    OffGrid(i64),
    #[error("enumeration budget of {0} exceeded")]
    Budget(usize),
}

/// A value of `d_C` on the half-integer log grid: `Exp2(k)` is `e^{k/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DcVal {
    /// `d_C(ξ, ξ) = 0`.
    Zero,
    Exp2(i64),
}

impl DcVal {
    /// `k` in `e^{k/2}`, `None` for zero.
    pub fn exp2(self) -> Option<i64> {
        match self {
            DcVal::Zero => None,
            DcVal::Exp2(k) => Some(k),
        }
    }

    /// Multiplies by `e^m`.
    pub fn scale(self, m: i64) -> DcVal {
        match self {
            DcVal::Zero => DcVal::Zero,
            DcVal::Exp2(k) => DcVal::Exp2(k + 2 * m),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            DcVal::Zero => 0.0,
            DcVal::Exp2(k) => libm::exp(k as f64 / 2.0),
        }
    }
}

impl Ord for DcVal {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (DcVal::Zero, DcVal::Zero) => Ordering::Equal,
            (DcVal::Zero, _) => Ordering::Less,
            (_, DcVal::Zero) => Ordering::Greater,
            (DcVal::Exp2(a), DcVal::Exp2(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for DcVal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for DcVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DcVal::Zero => write!(f, "0"),
            DcVal::Exp2(k) if k % 2 == 0 => write!(f, "e^{}", k / 2),
            DcVal::Exp2(k) => write!(f, "e^({k}/2)"),
        }
    }
}
