//! The Cayley tree of the free group `F_k` on `x₀, …, x_{k−1}`, a
//! `(q+1)`-regular tree with `q = 2k − 1`.
//!
//! Letters are `2i` for `x_i` and `2i + 1` for `x_i⁻¹`. The base vertex is the
//! identity. A reduced word is turned into a path code by keeping the first
//! letter and, later on, skipping the one letter that would backtrack.

use alloc::vec::Vec;

use num_rational::BigRational;

use super::{CylSpace, CylinderUnion, Ray, TreeError, Vertex};

/// Inverse letter.
pub fn inv(l: u32) -> u32 {
    l ^ 1
}

pub fn branching(k: u32) -> u32 {
    2 * k - 1
}

/// Free reduction.
pub fn reduce(w: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&inv(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(w: &[u32]) -> Vec<u32> {
    w.iter().rev().map(|&l| inv(l)).collect()
}

pub fn mul(u: &[u32], v: &[u32]) -> Vec<u32> {
    let mut w = u.to_vec();
    w.extend_from_slice(v);
    reduce(&w)
}

/// Word-metric distance `|u⁻¹v|`.
pub fn word_dist(u: &[u32], v: &[u32]) -> usize {
    mul(&inverse(u), v).len()
}

fn letter_code(prev: Option<u32>, l: u32) -> u32 {
    match prev {
        None => l,
        Some(p) => {
            debug_assert_ne!(l, inv(p));
            if l < inv(p) {
                l
            } else {
                l - 1
            }
        }
    }
}

fn code_letter(prev: Option<u32>, c: u32) -> u32 {
    match prev {
        None => c,
        Some(p) => {
            if c < inv(p) {
                c
            } else {
                c + 1
            }
        }
    }
}

/// Path code of a reduced word.
pub fn word_to_code(w: &[u32]) -> Vertex {
    Vertex((0..w.len()).map(|i| letter_code(i.checked_sub(1).map(|j| w[j]), w[i])).collect())
}

pub fn code_to_word(v: &Vertex) -> Vec<u32> {
    let mut w: Vec<u32> = Vec::with_capacity(v.depth());
    for &c in &v.0 {
        let l = code_letter(w.last().copied(), c);
        w.push(l);
    }
    w
}

/// An eventually periodic reduced infinite word `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CayleyEnd {
    prefix: Vec<u32>,
    period: Vec<u32>,
}

impl CayleyEnd {
    /// Fails unless `period` is cyclically reduced and the word is reduced.
    pub fn new(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self, TreeError> {
        let bad = TreeError::BadCode { pos: prefix.len(), code: 0, q: 0 };
        if period.is_empty() {
            return Err(bad);
        }
        let whole: Vec<u32> = prefix.iter().chain(&period).chain(&period[..1]).copied().collect();
        if reduce(&whole).len() != whole.len() {
            return Err(bad);
        }
        Ok(CayleyEnd { prefix, period })
    }

    /// `w · ℓ^∞`, the end of the ray that continues `w` with the letter `ℓ`.
    pub fn power_tail(w: &[u32], l: u32) -> Result<Self, TreeError> {
        CayleyEnd::new(w.to_vec(), alloc::vec![l])
    }

    pub fn letter(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn word(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.letter(i)).collect()
    }

    /// `g · ξ`.
    pub fn left_mul(&self, g: &[u32]) -> CayleyEnd {
        // Cancellation eats at most |g| letters, so |g| + 1 periods suffice.
        let n = self.prefix.len() + self.period.len() * (g.len() + 1);
        let prefix = mul(g, &self.word(n));
        CayleyEnd { prefix, period: self.period.clone() }
    }
}

impl Ray for CayleyEnd {
    fn step(&self, i: usize) -> u32 {
        letter_code(i.checked_sub(1).map(|j| self.letter(j)), self.letter(i))
    }
}

/// Image of a vertex (as a code) under left multiplication.
pub fn act_vertex(g: &[u32], v: &Vertex) -> Vertex {
    word_to_code(&mul(g, &code_to_word(v)))
}

/// The point at distance `t` from `p` toward `ξ`, by free reduction.
pub fn native_ray_point(p: &[u32], xi: &CayleyEnd, t: usize) -> Vec<u32> {
    let far = xi.word(p.len() + t + 1);
    let path = mul(&inverse(p), &far);
    mul(p, &path[..t])
}

/// Double coset representatives `⟨x₀⟩ w ⟨x₀⟩` of length at most `max_len`:
/// the identity and the reduced words that neither start nor end with `x₀^{±1}`.
///
/// For these, `|w|` is the distance between the axis of `x₀` and its image
/// under `w`.
pub fn visit_double_cosets(k: u32, max_len: usize, mut visit: impl FnMut(&[u32])) {
    assert!(k >= 2);
    visit(&[]);
    let mut w: Vec<u32> = Vec::new();
    fn rec(k: u32, max_len: usize, w: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if w.len() == max_len {
            return;
        }
        for l in 0..2 * k {
            if w.is_empty() && l < 2 {
                continue;
            }
            if w.last() == Some(&inv(l)) {
                continue;
            }
            w.push(l);
            if l >= 2 {
                visit(w);
            }
            rec(k, max_len, w, visit);
            w.pop();
        }
    }
    rec(k, max_len, &mut w, &mut visit);
}

/// Number of double coset representatives of each length `0..=max_len`.
pub fn double_coset_counts(k: u32, max_len: usize) -> Vec<u64> {
    let mut out = alloc::vec![0u64; max_len + 1];
    visit_double_cosets(k, max_len, |w| out[w.len()] += 1);
    out
}

/// All representatives up to `max_len`, refusing to list more than `budget`.
pub fn double_cosets(k: u32, max_len: usize, budget: usize) -> Result<Vec<Vec<u32>>, TreeError> {
    let mut out = Vec::new();
    let mut over = false;
    visit_double_cosets(k, max_len, |w| {
        if out.len() == budget {
            over = true;
        } else {
            out.push(w.to_vec());
        }
    });
    if over {
        Err(TreeError::Budget(budget))
    } else {
        Ok(out)
    }
}

/// `∂X₀`: ends whose first letter is not `x₀^{±1}`, a fundamental domain for
/// `⟨x₀⟩` acting on the boundary minus its two fixed points. Mass 1.
pub fn quotient_space(k: u32) -> CylSpace {
    CylSpace::restricted(branching(k), (2..2 * k).collect())
}

/// The ε-neighbourhood in `∂X₀` of the double coset `w`: the ends within
/// `d_C`-distance `ε = e^{kexp/2}` of `w·x₀^{±∞}`, where `C` is the axis of `x₀`.
///
/// Below 1 the map only takes the values `e^{−M}` with `M` a whole number, so
/// odd negative exponents are rejected.
pub fn neighborhood(k: u32, w: &[u32], kexp: i64) -> Result<(CylinderUnion, BigRational), TreeError> {
    let space = quotient_space(k);
    if kexp >= 0 {
        return Ok((space.whole(), BigRational::from_integer(1.into())));
    }
    if kexp % 2 != 0 {
        return Err(TreeError::OffGrid(kexp));
    }
    let m = (-kexp / 2) as usize;
    let cyls = if m <= w.len() {
        alloc::vec![word_to_code(&w[..m]).0]
    } else {
        let pad = m - w.len();
        [0u32, 1]
            .iter()
            .map(|&l| {
                let mut x = w.to_vec();
                x.extend(core::iter::repeat_n(l, pad));
                word_to_code(&x).0
            })
            .collect()
    };
    // The trivial coset is the axis itself; its cylinders fall outside ∂X₀.
    let u = CylinderUnion::new(cyls).expect("distinct branches");
    let mass = u.mass(&space);
    Ok((u, mass))
}

/// A convex set in word coordinates.
#[derive(Clone, Debug)]
pub enum WordConvex {
    Vertex(Vec<u32>),
    Line(CayleyEnd, CayleyEnd),
    Subtree(Vec<Vec<u32>>),
}

/// Projection by brute force over the word metric: the vertex of `C` nearest
/// to a deep point toward `ξ`. A line is searched along the path from its
/// point at depth `window` toward `b`; `None` if the optimum is at either end.
pub fn native_projection(c: &WordConvex, xi: &CayleyEnd, window: usize) -> Option<Vec<u32>> {
    let deep = xi.word(4 * window + 64);
    let cands: Vec<Vec<u32>> = match c {
        WordConvex::Vertex(v) => return Some(v.clone()),
        WordConvex::Line(a, b) => {
            let start = a.word(window);
            (0..=3 * window).map(|t| native_ray_point(&start, b, t)).collect()
        }
        WordConvex::Subtree(vs) => vs.clone(),
    };
    let (i, best) = cands.iter().enumerate().min_by_key(|(_, v)| word_dist(v, &deep))?;
    if matches!(c, WordConvex::Line(..)) && (i == 0 || i + 1 == cands.len()) {
        return None;
    }
    Some(best.clone())
}

/// Doubled exponent of `e^{½ d(ξ_t, η_t) − t}` in the word metric.
pub fn native_dc_limit(c: &WordConvex, xi: &CayleyEnd, eta: &CayleyEnd, t: usize, window: usize) -> Option<i64> {
    let p = native_projection(c, xi, window)?;
    let pp = native_projection(c, eta, window)?;
    let d = word_dist(&native_ray_point(&p, xi, t), &native_ray_point(&pp, eta, t));
    Some(d as i64 - 2 * t as i64)
}
