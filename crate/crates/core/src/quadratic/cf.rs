//! Artin continued fractions with polynomial partial quotients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{sqrt_floor, QuadIrr};
use crate::exactnum::{Poly, RatFunc};

/// `α = [a₀; a₁, a₂, …]` split into a preperiod and a minimal period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfExpansion {
    pub preperiod: Vec<Poly>,
    pub period: Vec<Poly>,
}

/// Result of [`cf_expand`]: either a full periodic expansion, or the prefix
/// computed before the state budget ran out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfOutcome {
    Periodic(CfExpansion),
    BudgetExceeded { prefix: Vec<Poly> },
}

impl CfExpansion {
    /// The `n`-th partial quotient.
    pub fn quotient(&self, n: usize) -> &Poly {
        if n < self.preperiod.len() {
            &self.preperiod[n]
        } else {
            &self.period[(n - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Convergents `p_k / q_k` for `k < n`.
    pub fn convergents(&self, n: usize) -> Vec<(Poly, Poly)> {
        convergents((0..n).map(|k| self.quotient(k).clone()))
    }
}

/// Convergents of a sequence of partial quotients.
pub fn convergents<I: IntoIterator<Item = Poly>>(quotients: I) -> Vec<(Poly, Poly)> {
    let mut out: Vec<(Poly, Poly)> = Vec::new();
    let mut back: Option<((Poly, Poly), (Poly, Poly))> = None;
    for a in quotients {
        let q = a.modulus();
        let (two, one) = back.take().unwrap_or(((Poly::zero(q), Poly::one(q)), (Poly::one(q), Poly::zero(q))));
        let next = (&(&a * &one.0) + &two.0, &(&a * &one.1) + &two.1);
        back = Some((one, next.clone()));
        out.push(next);
    }
    out
}

/// Exact expansion on the `(P, Q)` state `α = (P + √D)/Q`, stopping at the
/// first repeated state. At most `budget` partial quotients are produced.
pub fn cf_expand(alpha: &QuadIrr, budget: usize) -> CfOutcome {
    let d = alpha.discriminant();
    let w = sqrt_floor(&d);
    let (mut p, mut qq) = alpha.pq();
    let mut seen: BTreeMap<(Poly, Poly), usize> = BTreeMap::new();
    let mut quotients = Vec::new();
    loop {
        if let Some(&j) = seen.get(&(p.clone(), qq.clone())) {
            let period = quotients.split_off(j);
            return CfOutcome::Periodic(CfExpansion { preperiod: quotients, period });
        }
        if quotients.len() >= budget {
            return CfOutcome::BudgetExceeded { prefix: quotients };
        }
        seen.insert((p.clone(), qq.clone()), quotients.len());
        let a = (&p + &w).div_rem(&qq).expect("nonzero state").0;
        let p_next = &(&a * &qq) - &p;
        let q_next = (&d - &(&p_next * &p_next)).div_exact(&qq).expect("Q divides D - P^2");
        quotients.push(a);
        p = p_next;
        qq = q_next;
    }
}

/// Finite expansion of a rational function (Euclid's algorithm).
pub fn cf_expand_rational(r: &RatFunc) -> Vec<Poly> {
    let mut n = r.num().clone();
    let mut d = r.den().clone();
    let mut out = Vec::new();
    while !d.is_zero() {
        let (a, rem) = n.div_rem(&d).expect("nonzero");
        out.push(a);
        n = d;
        d = rem;
    }
    out
}
