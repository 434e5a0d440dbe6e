//! The Bruhat–Tits tree of SL₂(𝔽_q((X⁻¹))).
//!
//! A vertex is a ball `B(c, n) = {x : ν(x − c) ≥ n}`; the base vertex is
//! `B(0, 0)`. From a vertex `B(c, n)` one step up reaches `B(c, n − 1)` and
//! the `q` steps down fix the coefficient of `X^{-n}`.
//!
//! Path codes: the first step is `0` for up and `d + 1` for digit `d`; after
//! an up step, `0` is up again and `d ∈ 1..q` the (necessarily nonzero)
//! digit; after a down step the code is the digit itself.

use alloc::vec::Vec;
use core::cell::RefCell;

use super::{ray_lcp, Ray, Vertex};
use crate::exactnum::{embed_ratfunc, Laurent, Poly, RatFunc};
use crate::quadratic::{act, Mobius, QuadIrr};

/// A ball of 𝔽_q((X⁻¹)); the centre is a finite tail with digits below `level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    q: u32,
    level: i64,
    /// Index of `digits[0]`, which is nonzero; unused when `digits` is empty.
    lo: i64,
    digits: Vec<u32>,
}

impl Ball {
    /// `B(Σ digits[k] X^{-(lo+k)}, level)`; digits at or past `level` are dropped.
    pub fn new(q: u32, level: i64, lo: i64, mut digits: Vec<u32>) -> Ball {
        let keep = (level - lo).clamp(0, digits.len() as i64) as usize;
        digits.truncate(keep);
        while digits.last() == Some(&0) {
            digits.pop();
        }
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        digits.drain(..lead);
        let lo = if digits.is_empty() { 0 } else { lo + lead as i64 };
        Ball { q, level, lo, digits }
    }

    pub fn base(q: u32) -> Ball {
        Ball::new(q, 0, 0, Vec::new())
    }

    /// `B(ξ, n)` for a finite boundary point.
    pub fn around(xi: &BtEnd, n: i64) -> Ball {
        let q = xi.modulus();
        match xi.valuation() {
            Some(v) if v < n => Ball::new(q, n, v, (v..n).map(|i| xi.coeff(i)).collect()),
            _ => Ball::new(q, n, 0, Vec::new()),
        }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// Coefficient of `X^{-i}` in the centre.
    pub fn center_coeff(&self, i: i64) -> u32 {
        if i < self.lo || i >= self.lo + self.digits.len() as i64 {
            0
        } else {
            self.digits[(i - self.lo) as usize]
        }
    }

    fn center_valuation(&self) -> Option<i64> {
        (!self.digits.is_empty()).then_some(self.lo)
    }

    /// `min(n, ν(centre − f))` where `f` gives coefficients and has valuation `vf`.
    fn agree_below(&self, n: i64, vf: Option<i64>, f: impl Fn(i64) -> u32) -> i64 {
        let start = match (self.center_valuation(), vf) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return n,
        };
        (start..n).find(|&i| self.center_coeff(i) != f(i)).unwrap_or(n)
    }

    /// Level of the smallest ball containing both.
    pub fn meet_level(&self, o: &Ball) -> i64 {
        let n = self.level.min(o.level);
        self.agree_below(n, o.center_valuation(), |i| o.center_coeff(i))
    }

    pub fn dist(&self, o: &Ball) -> u64 {
        let m = self.meet_level(o);
        ((self.level - m) + (o.level - m)) as u64
    }

    /// Whether a finite boundary point lies in the ball.
    pub fn contains(&self, xi: &BtEnd) -> bool {
        match xi {
            BtEnd::Infinity => false,
            _ => self.agree_below(self.level, xi.valuation(), |i| xi.coeff(i)) == self.level,
        }
    }

    /// `ν(ξ − centre)` capped at `cap`.
    fn nu_from(&self, xi: &BtEnd, cap: i64) -> i64 {
        self.agree_below(cap, xi.valuation(), |i| xi.coeff(i))
    }

    pub fn to_code(&self) -> Vertex {
        let m = [0, self.level, self.center_valuation().unwrap_or(i64::MAX)].into_iter().min().unwrap();
        let ups = (-m) as usize;
        let mut code = alloc::vec![0u32; ups];
        for idx in m..self.level {
            let d = self.center_coeff(idx);
            code.push(if ups == 0 && idx == m { d + 1 } else { d });
        }
        Vertex(code)
    }

    pub fn from_code(q: u32, v: &Vertex) -> Ball {
        let (level, lo, digits, _) = walk(q, &v.0);
        Ball::new(q, level, lo, digits)
    }

    /// The centre as a rational function.
    pub fn center(&self) -> RatFunc {
        tail_to_ratfunc(self.q, self.lo, &self.digits)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Base,
    Up,
    Down,
}

/// Follows a code from the base: `(level, lo, digits, last step)`.
fn walk(q: u32, code: &[u32]) -> (i64, i64, Vec<u32>, Step) {
    let mut level = 0i64;
    let mut state = Step::Base;
    let mut set: Vec<(i64, u32)> = Vec::new();
    for &c in code {
        debug_assert!(c <= q);
        let digit = match (state, c) {
            (Step::Down, d) => Some(d),
            (Step::Base, 0) | (Step::Up, 0) => None,
            (Step::Base, c) => Some(c - 1),
            (Step::Up, d) => Some(d),
        };
        match digit {
            None => {
                level -= 1;
                state = Step::Up;
            }
            Some(d) => {
                set.push((level, d));
                level += 1;
                state = Step::Down;
            }
        }
    }
    let lo = set.first().map_or(0, |x| x.0);
    let digits = set.iter().map(|x| x.1).collect();
    (level, lo, digits, state)
}

fn tail_to_ratfunc(q: u32, lo: i64, digits: &[u32]) -> RatFunc {
    if digits.is_empty() {
        return RatFunc::from_poly(Poly::zero(q));
    }
    let hi = lo + digits.len() as i64 - 1;
    let l = hi.max(0);
    let mut num = alloc::vec![0u32; (l - lo + 1) as usize];
    for (k, &d) in digits.iter().enumerate() {
        num[(l - (lo + k as i64)) as usize] = d;
    }
    RatFunc::new(Poly::from_residues(q, num), Poly::monomial(q, 1, l as usize)).expect("nonzero denominator")
}

/// A boundary point of the tree: `∞` or a point of 𝔽_q((X⁻¹)) whose digits
/// are produced on demand and memoized.
#[derive(Debug)]
pub enum BtEnd {
    Infinity,
    Rat { q: u32, r: RatFunc, cache: RefCell<Laurent> },
    Quad { alpha: QuadIrr, cache: RefCell<Laurent> },
}

impl Clone for BtEnd {
    fn clone(&self) -> Self {
        match self {
            BtEnd::Infinity => BtEnd::Infinity,
            BtEnd::Rat { q, r, cache } => BtEnd::Rat { q: *q, r: r.clone(), cache: RefCell::new(cache.borrow().clone()) },
            BtEnd::Quad { alpha, cache } => BtEnd::Quad { alpha: alpha.clone(), cache: RefCell::new(cache.borrow().clone()) },
        }
    }
}

impl BtEnd {
    pub fn rational(r: RatFunc) -> BtEnd {
        let q = r.modulus();
        let cache = RefCell::new(embed_ratfunc(&r, 16));
        BtEnd::Rat { q, r, cache }
    }

    pub fn quadratic(alpha: QuadIrr) -> BtEnd {
        let cache = RefCell::new(alpha.expand(16));
        BtEnd::Quad { alpha, cache }
    }

    /// The end reached by following `code` and then digit 0 forever (or up
    /// forever if the code ends with an up step).
    pub fn from_code_prefix(q: u32, code: &[u32]) -> BtEnd {
        let (_, lo, digits, state) = walk(q, code);
        match state {
            Step::Down => BtEnd::rational(tail_to_ratfunc(q, lo, &digits)),
            _ => BtEnd::Infinity,
        }
    }

    pub fn modulus(&self) -> u32 {
        match self {
            BtEnd::Infinity => 0,
            BtEnd::Rat { q, .. } => *q,
            BtEnd::Quad { alpha, .. } => alpha.modulus(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, BtEnd::Infinity)
    }

    /// `ν(ξ)`; `None` for `ξ = 0` and for `∞`.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            BtEnd::Infinity => None,
            BtEnd::Rat { r, .. } => {
                let n = r.num().degree()?;
                Some(r.den().degree().unwrap() as i64 - n as i64)
            }
            BtEnd::Quad { cache, .. } => cache.borrow().valuation(),
        }
    }

    /// Coefficient of `X^{-i}`, extending the expansion as needed.
    pub fn coeff(&self, i: i64) -> u32 {
        let (cache, v) = match self {
            BtEnd::Infinity => panic!("∞ has no digits"),
            BtEnd::Rat { cache, .. } | BtEnd::Quad { cache, .. } => (cache, self.valuation()),
        };
        let Some(v) = v else { return 0 };
        if i < v {
            return 0;
        }
        if let Some(c) = cache.borrow().coeff(i) {
            return c;
        }
        let need = (i - v + 1) as usize;
        let prec = need.max(2 * cache.borrow().precision());
        let fresh = match self {
            BtEnd::Rat { r, .. } => embed_ratfunc(r, prec),
            BtEnd::Quad { alpha, .. } => alpha.expand(prec),
            BtEnd::Infinity => unreachable!(),
        };
        let c = fresh.coeff(i).expect("extended far enough");
        *cache.borrow_mut() = fresh;
        c
    }

    /// Image under a homography.
    pub fn act(&self, g: &Mobius) -> BtEnd {
        let [a, b, c, d] = g.entries();
        let rf = |p: &Poly| RatFunc::from_poly(p.clone());
        match self {
            BtEnd::Infinity => {
                if c.is_zero() {
                    BtEnd::Infinity
                } else {
                    BtEnd::rational(rf(a).div(&rf(c)).expect("c ≠ 0"))
                }
            }
            BtEnd::Rat { r, .. } => {
                let den = rf(c).mul(r).add(&rf(d));
                if den.is_zero() {
                    BtEnd::Infinity
                } else {
                    BtEnd::rational(rf(a).mul(r).add(&rf(b)).div(&den).expect("nonzero"))
                }
            }
            BtEnd::Quad { alpha, .. } => BtEnd::quadratic(act(g, alpha)),
        }
    }
}

impl Ray for BtEnd {
    fn step(&self, i: usize) -> u32 {
        if self.is_infinity() {
            return 0;
        }
        match self.valuation() {
            Some(v) if v < 0 => {
                let ups = (-v) as usize;
                if i < ups {
                    0
                } else {
                    self.coeff(v + (i - ups) as i64)
                }
            }
            _ => {
                let d = self.coeff(i as i64);
                if i == 0 {
                    d + 1
                } else {
                    d
                }
            }
        }
    }
}

/// Image of a vertex under a homography, as the centre of the image tripod.
pub fn act_vertex(g: &Mobius, v: &Vertex, q: u32) -> Vertex {
    let ends: Vec<BtEnd> = (0..3)
        .map(|s| {
            let mut c = v.0.clone();
            c.push(s);
            BtEnd::from_code_prefix(q, &c).act(g)
        })
        .collect();
    tripod_center(&ends[0], &ends[1], &ends[2], super::DEFAULT_DEPTH)
}

/// Centre of the ideal triangle with vertices `a, b, c`.
pub fn tripod_center<R: Ray + ?Sized>(a: &R, b: &R, c: &R, cap: usize) -> Vertex {
    let ab = ray_lcp(a, b, cap).expect("distinct");
    let ac = ray_lcp(a, c, cap).expect("distinct");
    let bc = ray_lcp(b, c, cap).expect("distinct");
    if ab >= ac && ab >= bc {
        Vertex::on_ray(a, ab)
    } else if ac >= bc {
        Vertex::on_ray(a, ac)
    } else {
        Vertex::on_ray(b, bc)
    }
}

/// `−ν(ξ − η)`, the exponent of the Hamenstädt distance `e^{−ν(ξ−η)}` for the
/// horoball at ∞ through the base vertex; `None` if they agree below `cap`.
pub fn hamenstadt(xi: &BtEnd, eta: &BtEnd, cap: i64) -> Option<i64> {
    assert!(!xi.is_infinity() && !eta.is_infinity());
    let start = match (xi.valuation(), eta.valuation()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return None,
    };
    (start..cap).find(|&i| xi.coeff(i) != eta.coeff(i)).map(|v| -v)
}

/// Doubled exponent of `e^{½ d(η_t, η′_t) − t}` for the lines from ∞ through
/// the level-0 horosphere.
pub fn hamenstadt_limit(xi: &BtEnd, eta: &BtEnd, t: i64) -> i64 {
    Ball::around(xi, t).dist(&Ball::around(eta, t)) as i64 - 2 * t
}

/// The vertex at distance `t` from `p` toward `ξ`, computed with balls.
pub fn native_ray_point(p: &Ball, xi: &BtEnd, t: u64) -> Ball {
    let t = t as i64;
    let n = p.level;
    if xi.is_infinity() {
        return Ball::new(p.q, n - t, p.lo, p.digits.clone());
    }
    let m = p.nu_from(xi, n);
    if t <= n - m {
        Ball::new(p.q, n - t, p.lo, p.digits.clone())
    } else {
        Ball::around(xi, m + (t - (n - m)))
    }
}

/// Deep vertex `ξ_T` on the ray from the base toward `ξ`.
pub fn deep_point(xi: &BtEnd, q: u32, t: i64) -> Ball {
    if xi.is_infinity() {
        Ball::new(q, -t, 0, Vec::new())
    } else {
        Ball::around(xi, t)
    }
}

/// Vertices of the line `]a, b[` with level in `[-r, r]`.
pub fn line_vertices(a: &BtEnd, b: &BtEnd, r: i64) -> Vec<Ball> {
    let mut out = Vec::new();
    let mut push_ray = |x: &BtEnd, from: i64| {
        for n in from.max(-r)..=r {
            out.push(Ball::around(x, n));
        }
    };
    match (a.is_infinity(), b.is_infinity()) {
        (true, true) => panic!("degenerate line"),
        (true, false) => push_ray(b, i64::MIN / 2),
        (false, true) => push_ray(a, i64::MIN / 2),
        (false, false) => {
            let d = -hamenstadt(a, b, r + 1).unwrap_or(-(r + 1));
            push_ray(a, d);
            push_ray(b, d + 1);
        }
    }
    out
}

/// A convex set in ball coordinates.
#[derive(Clone, Debug)]
pub enum BallConvex {
    Vertex(Ball),
    Line(BtEnd, BtEnd),
    Subtree(Vec<Ball>),
}

/// Projection by brute force: the vertex of `C` nearest to a deep point of
/// the ray toward `ξ`. Line vertices are searched at levels in
/// `[-window, window]`; `None` if the optimum sits on the search boundary.
pub fn native_projection(c: &BallConvex, xi: &BtEnd, q: u32, window: i64) -> Option<Ball> {
    let deep = deep_point(xi, q, 4 * window + 64);
    let cands = match c {
        BallConvex::Vertex(v) => return Some(v.clone()),
        BallConvex::Line(a, b) => line_vertices(a, b, window),
        BallConvex::Subtree(vs) => vs.clone(),
    };
    let best = cands.iter().min_by_key(|v| v.dist(&deep))?;
    if matches!(c, BallConvex::Line(..)) && best.level().abs() >= window {
        return None;
    }
    Some(best.clone())
}

/// Doubled exponent of `e^{½ d(ξ_t, η_t) − t}` with `ξ_t, η_t` at distance
/// `t` from the projections.
pub fn native_dc_limit(c: &BallConvex, xi: &BtEnd, eta: &BtEnd, q: u32, t: u64, window: i64) -> Option<i64> {
    let p = native_projection(c, xi, q, window)?;
    let pp = native_projection(c, eta, q, window)?;
    let d = native_ray_point(&p, xi, t).dist(&native_ray_point(&pp, eta, t));
    Some(d as i64 - 2 * t as i64)
}
