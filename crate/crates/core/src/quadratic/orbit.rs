//! Breadth-first enumeration of an SL₂(𝔽_q[X])-orbit up to a height bound.
//!
//! Orbit elements are stored through their fractional part (the translate
//! with zero polynomial part), so the set is finite for every bound. The
//! generators are `x ↦ −1/(x + b)` for translations `b`, followed by
//! reduction to the fractional part, together with `x ↦ t²x` for `t ∈ 𝔽_q*`.
//! Only translations that can keep the height within the bound are tried;
//! `d_max` additionally caps their degree.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{act, Mobius, QuadIrr};
use crate::exactnum::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitConfig {
    /// `log_q` of the height bound `H_max`.
    pub h_max_log_q: i64,
    /// Degree cap on translation generators.
    pub d_max: usize,
    /// Maximal number of stored elements.
    pub budget: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { h_max_log_q: 4, d_max: 3, budget: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitResult {
    /// The base point itself followed by every fractional-part orbit element
    /// of height ≤ `H_max` that was found, sorted by `(height, A, B, C, σ)`.
    pub elements: Vec<QuadIrr>,
    /// Two consecutive rounds added nothing and the budget was not hit.
    pub complete: bool,
    pub budget_exhausted: bool,
    /// Some translation that would have stayed under the bound exceeded `d_max`.
    pub cap_binding: bool,
    pub rounds: usize,
}

/// Subtracts the polynomial part.
pub fn fractional_part(x: &QuadIrr) -> QuadIrr {
    let f = x.floor();
    if f.is_zero() {
        return x.clone();
    }
    act(&Mobius::translation(-&f), x)
}

pub fn orbit_enumerate(alpha: &QuadIrr, cfg: &OrbitConfig) -> OrbitResult {
    let q = alpha.modulus();
    let dd = alpha.discriminant().degree().expect("nonzero") as i64;
    let mut found: BTreeSet<(i64, QuadIrr)> = BTreeSet::new();
    let mut frontier: Vec<QuadIrr> = Vec::new();
    let start = fractional_part(alpha);
    if start.height_log_q() <= cfg.h_max_log_q {
        found.insert((start.height_log_q(), start.clone()));
        frontier.push(start);
    }
    let mut empty_rounds = 0;
    let mut rounds = 0;
    let mut budget_exhausted = false;
    let mut cap_binding = false;
    'outer: while empty_rounds < 2 {
        rounds += 1;
        let mut next = Vec::new();
        for x in &frontier {
            let (kids, capped) = children(x, cfg, q, dd);
            cap_binding |= capped;
            for k in kids {
                let key = (k.height_log_q(), k);
                if found.contains(&key) {
                    continue;
                }
                if found.len() >= cfg.budget {
                    budget_exhausted = true;
                    break 'outer;
                }
                next.push(key.1.clone());
                found.insert(key);
            }
        }
        if next.is_empty() {
            empty_rounds += 1;
        } else {
            empty_rounds = 0;
        }
        next.sort();
        frontier = next;
    }
    let mut elements = Vec::with_capacity(found.len() + 1);
    elements.push(alpha.clone());
    elements.extend(found.into_iter().map(|(_, x)| x).filter(|x| x != alpha));
    OrbitResult { complete: !budget_exhausted && empty_rounds >= 2, budget_exhausted, cap_binding, rounds, elements }
}

/// Images of a fractional element under the generators that stay under the bound.
fn children(x: &QuadIrr, cfg: &OrbitConfig, q: u32, dd: i64) -> (Vec<QuadIrr>, bool) {
    let mut out = Vec::new();
    let mut capped = false;
    for t in 2..q {
        let y = act(&Mobius::diag(q, t), x);
        if &y != x {
            out.push(y);
        }
    }
    // Height of −1/(x + b) is h(x)·|b − x|·|b − x*|; with |x| < 1 only small
    // b or b close to ⌊x*⌋ keep the product below q^L.
    let budget_log = cfg.h_max_log_q - x.height_log_q();
    let mut cands: BTreeSet<Poly> = BTreeSet::new();
    cands.insert(Poly::zero(q));
    if budget_log >= 0 {
        cands.extend(Poly::enumerate(q, (budget_log / 2) as usize));
    }
    let fc = x.conjugate().floor();
    if let Some(m) = fc.degree() {
        let m = m as i64;
        cands.insert(fc.clone());
        let top = (m - 1).min(budget_log - m);
        if top >= 0 {
            for e in Poly::enumerate(q, top as usize) {
                cands.insert(&fc + &e);
            }
        }
    }
    let s = Mobius::s(q);
    for b in cands {
        let a = x.a();
        // Translated constant coefficient A b² − B b + C becomes the new leading one.
        let cb = &(&(a * &(&b * &b)) - &(x.b() * &b)) + x.c();
        let h = cb.degree().expect("irrational") as i64 - dd / 2;
        if h > cfg.h_max_log_q {
            continue;
        }
        if b.degree().unwrap_or(0) > cfg.d_max {
            capped = true;
            continue;
        }
        let g = s.compose(&Mobius::translation(b));
        out.push(fractional_part(&act(&g, x)));
    }
    (out, capped)
}
