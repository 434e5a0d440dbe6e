use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{CylinderUnion, DcVal, TreeError};

/// A geodesic ray from the base vertex, read one step at a time.
pub trait Ray {
    /// Code of step `i` (0-based).
    fn step(&self, i: usize) -> u32;
}

impl<R: Ray + ?Sized> Ray for &R {
    fn step(&self, i: usize) -> u32 {
        (**self).step(i)
    }
}

impl<R: Ray + ?Sized> Ray for alloc::boxed::Box<R> {
    fn step(&self, i: usize) -> u32 {
        (**self).step(i)
    }
}

/// An eventually periodic ray `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeriodicRay {
    pub prefix: Vec<u32>,
    pub period: Vec<u32>,
}

impl PeriodicRay {
    pub fn new(prefix: Vec<u32>, period: Vec<u32>) -> Self {
        assert!(!period.is_empty(), "empty period");
        PeriodicRay { prefix, period }
    }
}

impl Ray for PeriodicRay {
    fn step(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }
}

/// A vertex, as its path code from the base vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex(pub Vec<u32>);

impl Vertex {
    pub fn base() -> Vertex {
        Vertex(Vec::new())
    }

    /// Distance to the base vertex.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Checks every step against the branching `q`.
    pub fn validate(&self, q: u32) -> Result<(), TreeError> {
        for (pos, &code) in self.0.iter().enumerate() {
            let arity = if pos == 0 { q + 1 } else { q };
            if code >= arity {
                return Err(TreeError::BadCode { pos, code, q });
            }
        }
        Ok(())
    }

    pub fn prefix(&self, n: usize) -> Vertex {
        Vertex(self.0[..n].to_vec())
    }

    pub fn lcp(&self, o: &Vertex) -> usize {
        self.0.iter().zip(&o.0).take_while(|(a, b)| a == b).count()
    }

    pub fn dist(&self, o: &Vertex) -> usize {
        self.depth() + o.depth() - 2 * self.lcp(o)
    }

    /// First `n` steps of a ray.
    pub fn on_ray<R: Ray + ?Sized>(r: &R, n: usize) -> Vertex {
        Vertex((0..n).map(|i| r.step(i)).collect())
    }

    /// Steps shared with a ray (at most `depth()`).
    pub fn lcp_ray<R: Ray + ?Sized>(&self, r: &R) -> usize {
        self.0.iter().enumerate().take_while(|(i, &c)| r.step(*i) == c).count()
    }
}

/// Length of the common prefix of two rays, `None` if they agree through `cap`.
pub fn ray_lcp<R: Ray + ?Sized, S: Ray + ?Sized>(a: &R, b: &S, cap: usize) -> Option<usize> {
    (0..cap).find(|&i| a.step(i) != b.step(i))
}

/// Gromov product `(ξ|η)` at the base vertex.
pub fn gromov_ends<R: Ray + ?Sized, S: Ray + ?Sized>(a: &R, b: &S, cap: usize) -> Option<usize> {
    ray_lcp(a, b, cap)
}

/// Gromov product `(v|ξ)` at the base vertex.
pub fn gromov_vertex_end<R: Ray + ?Sized>(v: &Vertex, r: &R) -> usize {
    v.lcp_ray(r)
}

/// Busemann cocycle `β_ξ(x, y) = lim d(x, ξ_t) − d(y, ξ_t)`.
pub fn busemann<R: Ray + ?Sized>(xi: &R, x: &Vertex, y: &Vertex) -> i64 {
    let b = |v: &Vertex| v.depth() as i64 - 2 * v.lcp_ray(xi) as i64;
    b(x) - b(y)
}

/// The vertex at distance `t` from `v` on the ray `[v, ξ⟩`.
pub fn ray_point<R: Ray + ?Sized>(v: &Vertex, xi: &R, t: usize) -> Vertex {
    let m = v.lcp_ray(xi);
    let up = v.depth() - m;
    if t <= up {
        v.prefix(v.depth() - t)
    } else {
        Vertex::on_ray(xi, m + (t - up))
    }
}

/// A closed convex subset of the tree.
#[derive(Clone, Debug)]
pub enum ConvexSub<R> {
    Vertex(Vertex),
    /// The geodesic line between two distinct boundary points.
    Line(R, R),
    /// A finite connected set of vertices.
    Subtree(Vec<Vertex>),
}

impl<R: Ray> ConvexSub<R> {
    /// Checks connectivity of a finite subtree: every vertex but the one
    /// closest to the base has its parent in the set.
    pub fn subtree(mut vs: Vec<Vertex>) -> Result<Self, TreeError> {
        vs.sort();
        vs.dedup();
        if vs.is_empty() {
            return Err(TreeError::BadSubtree);
        }
        let set: alloc::collections::BTreeSet<&Vertex> = vs.iter().collect();
        let mut roots = 0;
        for v in &vs {
            let has_parent = v.depth() > 0 && set.contains(&v.prefix(v.depth() - 1));
            if !has_parent {
                roots += 1;
            }
        }
        // A finite set is connected iff exactly one member lacks its parent
        // (the base, if present, is that member).
        if roots != 1 {
            return Err(TreeError::BadSubtree);
        }
        Ok(ConvexSub::Subtree(vs))
    }
}

/// Vertices at distance at most `m` from a finite set.
pub fn thicken(vs: &[Vertex], m: usize, q: u32) -> Vec<Vertex> {
        let mut out: alloc::collections::BTreeSet<Vertex> = vs.iter().cloned().collect();
        let mut frontier: Vec<Vertex> = vs.to_vec();
        for _ in 0..m {
            let mut next = Vec::new();
            for v in &frontier {
                for w in neighbors(v, q) {
                    if out.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        out.into_iter().collect()
}

/// The `q + 1` neighbours of a vertex.
pub fn neighbors(v: &Vertex, q: u32) -> Vec<Vertex> {
    let mut out = Vec::new();
    if v.depth() > 0 {
        out.push(v.prefix(v.depth() - 1));
    }
    let arity = if v.depth() == 0 { q + 1 } else { q };
    for c in 0..arity {
        let mut w = v.0.clone();
        w.push(c);
        out.push(Vertex(w));
    }
    out
}

/// `π_C(ξ)`: the point of `C` where the horoballs centred at `ξ` first touch.
pub fn closest_point<R: Ray, S: Ray + ?Sized>(c: &ConvexSub<R>, xi: &S, cap: usize) -> Result<Vertex, TreeError> {
    match c {
        ConvexSub::Vertex(v) => Ok(v.clone()),
        ConvexSub::Line(a, b) => {
            let lab = ray_lcp(a, b, cap).ok_or(TreeError::DegenerateLine)?;
            let la = ray_lcp(a, xi, cap).ok_or(TreeError::ProjectionAtInfinity)?;
            let lb = ray_lcp(b, xi, cap).ok_or(TreeError::ProjectionAtInfinity)?;
            // Centre of the tripod (a, b, ξ): the deepest pairwise branch point.
            Ok(if lab >= la && lab >= lb {
                Vertex::on_ray(a, lab)
            } else if la >= lb {
                Vertex::on_ray(a, la)
            } else {
                Vertex::on_ray(b, lb)
            })
        }
        ConvexSub::Subtree(vs) => {
            let key = |v: &Vertex| v.depth() as i64 - 2 * v.lcp_ray(xi) as i64;
            let best = vs.iter().map(key).min().ok_or(TreeError::BadSubtree)?;
            let mut it = vs.iter().filter(|v| key(v) == best);
            let p = it.next().expect("nonempty").clone();
            if it.next().is_some() {
                return Err(TreeError::BadSubtree);
            }
            Ok(p)
        }
    }
}

/// The distance-like map `d_C(ξ, η)` by the tree case formula.
///
/// Different projections give `e^{d(π_Cξ, π_Cη)/2}`; equal projections `p`
/// give `e^{−m}` with `m` the length of `[p, ξ⟩ ∩ [p, η⟩`.
pub fn d_c<R: Ray, S: Ray + ?Sized, T: Ray + ?Sized>(
    c: &ConvexSub<R>,
    xi: &S,
    eta: &T,
    cap: usize,
) -> Result<DcVal, TreeError> {
    let p = closest_point(c, xi, cap)?;
    let pp = closest_point(c, eta, cap)?;
    if p != pp {
        return Ok(DcVal::Exp2(p.dist(&pp) as i64));
    }
    let Some(l) = ray_lcp(xi, eta, cap) else {
        return Ok(DcVal::Zero);
    };
    let overlap = l as i64 + p.depth() as i64 - p.lcp_ray(xi) as i64 - p.lcp_ray(eta) as i64;
    Ok(DcVal::Exp2(-2 * overlap))
}

/// Distance between two geodesic lines, from the four pairwise Gromov products.
pub fn line_distance<R: Ray>(l1: (&R, &R), l2: (&R, &R), cap: usize) -> Result<usize, TreeError> {
    let g = |x: &R, y: &R| ray_lcp(x, y, cap).map(|v| v as i64);
    let (a, b) = l1;
    let (c, d) = l2;
    let ab = g(a, b).ok_or(TreeError::DegenerateLine)?;
    let cd = g(c, d).ok_or(TreeError::DegenerateLine)?;
    let (ac, ad, bc, bd) = (g(a, c), g(a, d), g(b, c), g(b, d));
    // Shared endpoints make the lines meet (or coincide).
    let (Some(ac), Some(ad), Some(bc), Some(bd)) = (ac, ad, bc, bd) else {
        return Ok(0);
    };
    Ok((ab + cd - (ac + bd).max(ad + bc)).max(0) as usize)
}

/// Distance from `C` to the geodesic `]ξ, η[`.
pub fn line_gap<R: Ray>(c: &ConvexSub<R>, xi: &R, eta: &R, cap: usize) -> Result<usize, TreeError> {
    let (a, b) = (Vertex::on_ray(xi, cap), Vertex::on_ray(eta, cap));
    let from = |v: &Vertex| (v.dist(&a) + v.dist(&b) - a.dist(&b)) / 2;
    match c {
        ConvexSub::Vertex(v) => Ok(from(v)),
        ConvexSub::Subtree(vs) => vs.iter().map(from).min().ok_or(TreeError::BadSubtree),
        ConvexSub::Line(l, m) => line_distance((l, m), (xi, eta), cap),
    }
}

/// Shadow of `v` seen from `x`: the ends whose ray from `x` passes through `v`.
pub fn shadow(x: &Vertex, v: &Vertex, q: u32) -> CylinderUnion {
    if x == v {
        return CylinderUnion::whole();
    }
    let m = x.lcp(v);
    if m < v.depth() {
        // x is not below v: everything below v.
        return CylinderUnion::from_sorted_antichain(alloc::vec![v.0.clone()]);
    }
    // v is a strict ancestor of x: all ends avoiding the child toward x.
    CylinderUnion::complement_of(&x.0[..v.depth() + 1], q)
}
