//! Random exact instances `(C, ξ, η)` on both tree models, each carried in
//! path codes and in the model's native coordinates.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

use super::bt::{Ball, BallConvex, BtEnd};
use super::cayley::{self, CayleyEnd, WordConvex};
use super::{neighbors, ConvexSub, Vertex};
use crate::exactnum::{Poly, RatFunc};
use crate::quadratic::random_quadirr;

fn rand_poly<R: Rng + ?Sized>(q: u32, max_deg: usize, rng: &mut R) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    Poly::from_residues(q, (0..=deg).map(|_| rng.gen_range(0..q)).collect())
}

/// A boundary point of the Bruhat–Tits tree: mostly rational or quadratic,
/// sometimes `∞`.
pub fn random_bt_end<R: Rng + ?Sized>(q: u32, rng: &mut R) -> BtEnd {
    match rng.gen_range(0..10) {
        0 => BtEnd::Infinity,
        1..=5 => {
            let num = rand_poly(q, 3, rng);
            let den = loop {
                let d = rand_poly(q, 3, rng);
                if !d.is_zero() {
                    break d;
                }
            };
            BtEnd::rational(RatFunc::new(num, den).expect("nonzero denominator"))
        }
        _ => BtEnd::quadratic(random_quadirr(q, 2, rng)),
    }
}

/// A vertex at depth below `max_depth`.
pub fn random_vertex<R: Rng + ?Sized>(q: u32, max_depth: usize, rng: &mut R) -> Vertex {
    let n = rng.gen_range(0..max_depth);
    Vertex((0..n).map(|i| rng.gen_range(0..if i == 0 { q + 1 } else { q })).collect())
}

/// A connected set of `size` vertices grown from a random vertex.
pub fn random_subtree<R: Rng + ?Sized>(q: u32, size: usize, rng: &mut R) -> Vec<Vertex> {
    let mut set: BTreeSet<Vertex> = BTreeSet::new();
    let mut list = alloc::vec![random_vertex(q, 4, rng)];
    set.insert(list[0].clone());
    while list.len() < size {
        let v = &list[rng.gen_range(0..list.len())];
        let ns = neighbors(v, q);
        let w = ns[rng.gen_range(0..ns.len())].clone();
        if set.insert(w.clone()) {
            list.push(w);
        }
    }
    list
}

fn same_end<R: super::Ray + ?Sized, S: super::Ray + ?Sized>(a: &R, b: &S) -> bool {
    super::ray_lcp(a, b, super::DEFAULT_DEPTH).is_none()
}

fn random_shape<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.gen_range(0..3)
}

pub struct BtInstance {
    pub q: u32,
    pub coded: ConvexSub<BtEnd>,
    pub native: BallConvex,
    pub xi: BtEnd,
    pub eta: BtEnd,
}

/// `ξ ≠ η`, neither on the boundary of `C`.
pub fn random_bt_instance<R: Rng + ?Sized>(q: u32, rng: &mut R) -> BtInstance {
    loop {
        let (coded, native) = match random_shape(rng) {
            0 => {
                let v = random_vertex(q, 6, rng);
                (ConvexSub::Vertex(v.clone()), BallConvex::Vertex(Ball::from_code(q, &v)))
            }
            1 => {
                let a = random_bt_end(q, rng);
                let b = random_bt_end(q, rng);
                if same_end(&a, &b) {
                    continue;
                }
                (ConvexSub::Line(a.clone(), b.clone()), BallConvex::Line(a, b))
            }
            _ => {
                let size = rng.gen_range(1..8);
                let vs = random_subtree(q, size, rng);
                let balls = vs.iter().map(|v| Ball::from_code(q, v)).collect();
                (ConvexSub::Subtree(vs), BallConvex::Subtree(balls))
            }
        };
        let xi = random_bt_end(q, rng);
        let eta = random_bt_end(q, rng);
        if same_end(&xi, &eta) {
            continue;
        }
        if let ConvexSub::Line(a, b) = &coded {
            if [a, b].iter().any(|e| same_end(*e, &xi) || same_end(*e, &eta)) {
                continue;
            }
        }
        return BtInstance { q, coded, native, xi, eta };
    }
}

/// A reduced eventually periodic word with a cyclically reduced period.
pub fn random_cayley_end<R: Rng + ?Sized>(k: u32, rng: &mut R) -> CayleyEnd {
    loop {
        let n = rng.gen_range(0..6);
        let mut w: Vec<u32> = Vec::new();
        while w.len() < n {
            let l = rng.gen_range(0..2 * k);
            if w.last() != Some(&cayley::inv(l)) {
                w.push(l);
            }
        }
        let p = rng.gen_range(1..4);
        let period: Vec<u32> = (0..p).map(|_| rng.gen_range(0..2 * k)).collect();
        if let Ok(e) = CayleyEnd::new(w, period) {
            return e;
        }
    }
}

pub struct CayleyInstance {
    pub k: u32,
    pub coded: ConvexSub<CayleyEnd>,
    pub native: WordConvex,
    pub xi: CayleyEnd,
    pub eta: CayleyEnd,
}

pub fn random_cayley_instance<R: Rng + ?Sized>(k: u32, rng: &mut R) -> CayleyInstance {
    let q = cayley::branching(k);
    loop {
        let (coded, native) = match random_shape(rng) {
            0 => {
                let v = random_vertex(q, 6, rng);
                (ConvexSub::Vertex(v.clone()), WordConvex::Vertex(cayley::code_to_word(&v)))
            }
            1 => {
                let a = random_cayley_end(k, rng);
                let b = random_cayley_end(k, rng);
                if same_end(&a, &b) {
                    continue;
                }
                (ConvexSub::Line(a.clone(), b.clone()), WordConvex::Line(a, b))
            }
            _ => {
                let size = rng.gen_range(1..8);
                let vs = random_subtree(q, size, rng);
                let words = vs.iter().map(cayley::code_to_word).collect();
                (ConvexSub::Subtree(vs), WordConvex::Subtree(words))
            }
        };
        let xi = random_cayley_end(k, rng);
        let eta = random_cayley_end(k, rng);
        if same_end(&xi, &eta) {
            continue;
        }
        if let ConvexSub::Line(a, b) = &coded {
            if [a, b].iter().any(|e| same_end(*e, &xi) || same_end(*e, &eta)) {
                continue;
            }
        }
        return CayleyInstance { k, coded, native, xi, eta };
    }
}
