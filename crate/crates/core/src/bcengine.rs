//! A Borel–Cantelli dichotomy engine over finite unions of boundary cylinders.
//!
//! An instance has items `i` with levels `n_i` and sets `B_i(ε)` on the grid
//! `ε = e^{−m}`. Each `B_i(e^{−m})` is the union of the length-`m` cylinders
//! along a few anchor rays, so it shrinks as `m` grows and is the whole space
//! for `m ≤ 0`. Rates are tables: `f₂(n) = e^{−m₂(n)}`, `f₃(n) = e^{−m₃(n)}`,
//! `f₁`, `f₄` exact rationals, and `f₅(e^{−m}) = b^{−m}` for a rational base
//! `b = e^δ`. Every mass is an exact rational.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::treespace::cayley::{self, branching, word_to_code};
use crate::treespace::{CylSpace, CylinderUnion};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BcError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("more than {0} cylinders needed")]
    Budget(usize),
}

/// `prefix · period^∞` as a path code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub prefix: Vec<u32>,
    pub period: Vec<u32>,
}

impl Anchor {
    pub fn digit(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn code(&self, m: usize) -> Vec<u32> {
        (0..m).map(|i| self.digit(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BcItem {
    pub label: String,
    pub level: usize,
    pub anchors: Vec<Anchor>,
}

impl BcItem {
    /// `B_i(e^{−m})`.
    pub fn set(&self, m: i64) -> CylinderUnion {
        if m <= 0 {
            return CylinderUnion::whole();
        }
        CylinderUnion::union_of(self.anchors.iter().map(|a| a.code(m as usize)))
    }
}

mod ratstr {
    use super::*;
    use core::str::FromStr;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter().map(|s| BigRational::from_str(s).map_err(D::Error::custom)).collect()
    }
}

mod ratone {
    use super::*;
    use core::str::FromStr;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let v = String::deserialize(d)?;
        BigRational::from_str(&v).map_err(D::Error::custom)
    }
}

/// Rate tables indexed by level `0..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateFns {
    #[serde(with = "ratstr")]
    pub f1: Vec<BigRational>,
    pub m2: Vec<i64>,
    pub m3: Vec<i64>,
    #[serde(with = "ratstr")]
    pub f4: Vec<BigRational>,
    #[serde(with = "ratone")]
    pub f5_base: BigRational,
}

fn pow(b: &BigRational, e: i64) -> BigRational {
    let p = BigRational::new(b.numer().pow(e.unsigned_abs() as u32), b.denom().pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

impl RateFns {
    /// `f₅(e^{−m}) = b^{−m}`.
    pub fn f5(&self, m: i64) -> BigRational {
        pow(&self.f5_base, -m)
    }

    /// `f₁(n) f₄(n) f₅(f₃(n))`.
    pub fn term(&self, n: usize) -> BigRational {
        &self.f1[n] * &self.f4[n] * self.f5(self.m3[n])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcInstance {
    pub name: String,
    pub space: CylSpace,
    pub items: Vec<BcItem>,
    pub rates: RateFns,
    pub first_level: usize,
    pub n_max: usize,
    /// Condition (5) is checked for `m₂(n) ≤ m ≤ m₂(n) + span`.
    pub span: i64,
    /// Largest acceptable constant `c`.
    pub c_max: f64,
    pub notes: Vec<String>,
}

impl BcInstance {
    pub fn validate(&self) -> Result<(), BcError> {
        let bad = |s: String| Err(BcError::Invalid(s));
        if !self.space.is_valid() {
            return bad("space".into());
        }
        let r = &self.rates;
        let need = self.n_max + 1;
        if r.f1.len() < need || r.m2.len() < need || r.m3.len() < need || r.f4.len() < need {
            return bad(format!("rate tables shorter than n_max + 1 = {need}"));
        }
        if r.f1.iter().chain(&r.f4).any(|v| *v <= BigRational::zero()) || r.f5_base <= BigRational::zero() {
            return bad("rates must be positive".into());
        }
        if self.first_level > self.n_max {
            return bad("first_level > n_max".into());
        }
        let q = self.space.q();
        for it in &self.items {
            if it.level < self.first_level || it.level > self.n_max {
                return bad(format!("item {} has level {} outside the range", it.label, it.level));
            }
            if it.anchors.is_empty() {
                return bad(format!("item {} has no anchors", it.label));
            }
            for a in &it.anchors {
                let ok = a.prefix.iter().enumerate().all(|(i, &d)| d < self.space.arity(i))
                    && !a.period.is_empty()
                    && a.period.iter().all(|&d| d < q)
                    && (!a.prefix.is_empty() || a.period[0] <= q);
                if !ok {
                    return bad(format!("item {} has an invalid anchor", it.label));
                }
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> core::ops::RangeInclusive<usize> {
        self.first_level..=self.n_max
    }

    /// Items grouped by level.
    pub fn by_level(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.n_max + 1];
        for (i, it) in self.items.iter().enumerate() {
            out[it.level].push(i);
        }
        out
    }

    /// `A_n = ⋃_{i ∈ I_n} B_i(f₃(n))`.
    pub fn level_union(&self, n: usize) -> CylinderUnion {
        let m = self.rates.m3[n];
        CylinderUnion::union_of(
            self.items.iter().filter(|it| it.level == n).flat_map(|it| it.set(m).cylinders().to_vec()),
        )
    }
}

/// Outcome of one numbered condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondResult {
    pub number: u8,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypReport {
    pub conditions: Vec<CondResult>,
    /// Range of `Card I_n / f₁(n)`; `None` if some level is empty.
    pub count_ratio: Option<(String, String)>,
    /// Range of `μ(B_i(ε)) / (f₄ f₅(ε))`; `None` if some set is null.
    pub mass_ratio: Option<(String, String)>,
    /// Smallest `k` with `c = e^k` enough for condition (7).
    pub containment_exp: i64,
    /// Smallest `c` for (4), (5) and (7) together.
    pub c: f64,
    /// Upper halves of (4) and (5) only, which is all part [A] needs.
    pub c_upper: f64,
    /// `c′ = e`, `c″ = b`.
    pub c_second: f64,
    pub warnings: Vec<String>,
}

impl HypReport {
    pub fn holds(&self, n: u8) -> bool {
        self.conditions[n as usize - 1].holds
    }

    pub fn first_failure(&self) -> Option<&CondResult> {
        self.conditions.iter().find(|c| !c.holds)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Min and max of a sequence of positive rationals; `None` if any is zero.
fn ratio_range(it: impl Iterator<Item = BigRational>) -> Option<(BigRational, BigRational)> {
    let mut out: Option<(BigRational, BigRational)> = None;
    for r in it {
        if r.is_zero() {
            return None;
        }
        out = Some(match out {
            None => (r.clone(), r),
            Some((lo, hi)) => (lo.min(r.clone()), hi.max(r)),
        });
    }
    out
}

fn band_c(range: &Option<(BigRational, BigRational)>) -> (f64, f64) {
    match range {
        None => (f64::INFINITY, f64::INFINITY),
        Some((lo, hi)) => {
            let up = to_f64(hi).max(1.0);
            (up.max(to_f64(&lo.recip())), up)
        }
    }
}

fn cond(number: u8, holds: bool, detail: impl Into<String>) -> CondResult {
    CondResult { number, holds, detail: detail.into() }
}

/// Checks conditions (1)–(7) on levels `first_level..=n_max`.
pub fn check_hypotheses(inst: &BcInstance) -> Result<HypReport, BcError> {
    inst.validate()?;
    let r = &inst.rates;
    let by_level = inst.by_level();
    let mut warnings = Vec::new();
    let mut conds = Vec::new();

    let bad1 = inst.levels().find(|&n| r.m3[n] < r.m2[n]);
    conds.push(match bad1 {
        Some(n) => cond(1, false, format!("f3 > f2 at n = {n}")),
        None => cond(1, true, "f3 <= f2"),
    });

    let bad2 = inst.levels().find(|&n| pow(&r.f5_base, r.m2[n]) > &r.f1[n] * &r.f4[n]);
    conds.push(match bad2 {
        Some(n) => cond(2, false, format!("1/f5(f2) > f4 f1 at n = {n}")),
        None => cond(2, true, "1/f5(f2) <= f4 f1"),
    });

    let base_ok = r.f5_base > BigRational::one();
    conds.push(cond(3, base_ok, format!("c' = e, c'' = {}", r.f5_base)));

    let counts = ratio_range(inst.levels().map(|n| {
        BigRational::from_integer(BigInt::from(by_level[n].len())) / &r.f1[n]
    }));
    let (c4, up4) = band_c(&counts);

    let mut masses = Vec::new();
    for it in &inst.items {
        let m2 = r.m2[it.level];
        for m in m2..=m2 + inst.span {
            let mu = it.set(m).mass(&inst.space);
            masses.push(mu / (&r.f4[it.level] * r.f5(m)));
        }
    }
    let masses = ratio_range(masses.into_iter());
    let (c5, up5) = band_c(&masses);

    // (6): sort every cylinder with its owner; overlaps are adjacent.
    let mut witness6 = None;
    for n in inst.levels() {
        let mut cyls: Vec<(Vec<u32>, usize)> = by_level[n]
            .iter()
            .flat_map(|&i| inst.items[i].set(r.m2[n]).cylinders().iter().map(move |c| (c.clone(), i)).collect::<Vec<_>>())
            .collect();
        cyls.sort();
        // A cylinder's extensions follow it contiguously, so track the open ancestors.
        let mut open: Vec<(Vec<u32>, usize)> = Vec::new();
        for (c, i) in cyls {
            while open.last().is_some_and(|(a, _)| !c.starts_with(a)) {
                open.pop();
            }
            if let Some((a, j)) = open.iter().find(|(_, j)| *j != i) {
                witness6 = Some((n, *j, i, a.clone(), c.clone()));
                break;
            }
            open.push((c, i));
        }
        if witness6.is_some() {
            break;
        }
    }
    let cond6 = match &witness6 {
        Some((n, a, b, ca, cb)) => cond(
            6,
            false,
            format!(
                "level {n}: {} and {} meet ({ca:?} contains {cb:?})",
                inst.items[*a].label, inst.items[*b].label
            ),
        ),
        None => cond(6, true, "same-level sets disjoint at f2"),
    };

    let (k7, witness7) = containment(inst)?;

    let c_total = c4.max(c5).max(libm::exp(k7 as f64));
    let show = |o: &Option<(BigRational, BigRational)>| o.as_ref().map(|(a, b)| (a.to_string(), b.to_string()));
    conds.push(cond(
        4,
        c4 <= inst.c_max,
        match &counts {
            Some((lo, hi)) => format!("Card I_n / f1 in [{lo}, {hi}]"),
            None => "some level is empty".to_string(),
        },
    ));
    conds.push(cond(
        5,
        c5 <= inst.c_max,
        match &masses {
            Some((lo, hi)) => format!("mu / (f4 f5) in [{lo}, {hi}]"),
            None => "some set is null".to_string(),
        },
    ));
    conds.push(cond6);
    let e7 = libm::exp(k7 as f64);
    conds.push(cond(
        7,
        e7 <= inst.c_max,
        match &witness7 {
            Some((i, j)) if k7 > 0 => {
                format!("needs c = e^{k7}, first at {} inside {}", inst.items[*j].label, inst.items[*i].label)
            }
            _ => format!("holds with c = e^{k7}"),
        },
    ));
    if c_total > inst.c_max {
        warnings.push(format!("c = {c_total:.4} exceeds c_max = {}", inst.c_max));
    }
    Ok(HypReport {
        conditions: conds,
        count_ratio: show(&counts),
        mass_ratio: show(&masses),
        containment_exp: k7,
        c: c_total,
        c_upper: up4.max(up5),
        c_second: to_f64(&r.f5_base),
        warnings,
    })
}

/// Smallest `k ≥ 0` such that for `n_i < n_j`, `B_j(f₃) ∩ B_i(f₃) ≠ ∅`
/// implies `B_j(f₂(n_j)) ⊆ B_i(e^k f₃(n_i))`, with the pair that set it.
fn containment(inst: &BcInstance) -> Result<(i64, Option<(usize, usize)>), BcError> {
    let r = &inst.rates;
    let q = inst.space.q();
    let sets3: Vec<CylinderUnion> = inst.items.iter().map(|it| it.set(r.m3[it.level])).collect();
    let mut index: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (i, s) in sets3.iter().enumerate() {
        for c in s.cylinders() {
            index.entry(c.clone()).or_default().push(i);
        }
    }
    let mut k = 0i64;
    let mut witness = None;
    for (j, it) in inst.items.iter().enumerate() {
        let mut met: Vec<usize> = Vec::new();
        for c in sets3[j].cylinders() {
            for l in 0..=c.len() {
                if let Some(v) = index.get(&c[..l]) {
                    met.extend(v.iter().copied());
                }
            }
            for (key, v) in index.range(c.clone()..) {
                if !key.starts_with(c) {
                    break;
                }
                met.extend(v.iter().copied());
            }
        }
        met.sort_unstable();
        met.dedup();
        let inner = it.set(r.m2[it.level]);
        for i in met {
            let ni = inst.items[i].level;
            if ni >= it.level {
                continue;
            }
            while !inst.items[i].set(r.m3[ni] - k).contains(&inner, q) {
                k += 1;
                witness = Some((i, j));
            }
        }
    }
    Ok((k, witness))
}

/// Exact masses of a truncation `first_level..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: usize,
    /// `μ(A_n)` for each level.
    pub level_masses: Vec<String>,
    /// `μ(⋃_{n₀ ≤ k ≤ n_max} A_k)` for each `n₀`.
    pub tails: Vec<String>,
    /// `max μ(A_k ∩ A_l) / (μ(A_k) μ(A_l))` over distinct levels with both masses positive.
    pub quasi_independence: f64,
    /// `(Σ μ(A_k))² / Σ μ(A_k ∩ A_l)` over the second half of the levels.
    pub chung_erdos: f64,
    #[serde(skip)]
    pub exact_tails: Vec<BigRational>,
    #[serde(skip)]
    pub exact_levels: Vec<BigRational>,
}

fn check_budget(u: &CylinderUnion, budget: usize) -> Result<(), BcError> {
    if u.len() > budget {
        Err(BcError::Budget(budget))
    } else {
        Ok(())
    }
}

/// `μ(⋃_{n₀ ≤ k ≤ n_max} A_k)`, exactly.
pub fn limsup_measure_truncated(inst: &BcInstance, n0: usize, n_max: usize, budget: usize) -> Result<BigRational, BcError> {
    inst.validate()?;
    let mut u = CylinderUnion::empty();
    for n in n0.max(inst.first_level)..=n_max.min(inst.n_max) {
        u = u.union(&inst.level_union(n));
        check_budget(&u, budget)?;
    }
    Ok(u.mass(&inst.space))
}

pub fn truncation(inst: &BcInstance, budget: usize) -> Result<Truncation, BcError> {
    inst.validate()?;
    let levels: Vec<CylinderUnion> = inst.levels().map(|n| inst.level_union(n)).collect();
    for l in &levels {
        check_budget(l, budget)?;
    }
    let masses: Vec<BigRational> = levels.iter().map(|u| u.mass(&inst.space)).collect();
    let mut tails = alloc::vec![BigRational::zero(); levels.len()];
    let mut acc = CylinderUnion::empty();
    for i in (0..levels.len()).rev() {
        acc = acc.union(&levels[i]);
        check_budget(&acc, budget)?;
        tails[i] = acc.mass(&inst.space);
    }
    let n = levels.len();
    let mut inter = alloc::vec![alloc::vec![BigRational::zero(); n]; n];
    let mut qi = 0f64;
    for a in 0..n {
        inter[a][a] = masses[a].clone();
        for b in a + 1..n {
            let m = levels[a].intersect(&levels[b]).mass(&inst.space);
            if !masses[a].is_zero() && !masses[b].is_zero() {
                qi = qi.max(to_f64(&(&m / (&masses[a] * &masses[b]))));
            }
            inter[a][b] = m.clone();
            inter[b][a] = m;
        }
    }
    let half = n / 2;
    let s: BigRational = masses[half..].iter().sum();
    let ss: BigRational = inter[half..].iter().flat_map(|row| row[half..].iter()).sum();
    let chung_erdos = if ss.is_zero() { 0.0 } else { to_f64(&(&s * &s / ss)) };
    Ok(Truncation {
        n_max: inst.n_max,
        level_masses: masses.iter().map(|m| m.to_string()).collect(),
        tails: tails.iter().map(|m| m.to_string()).collect(),
        quasi_independence: qi,
        chung_erdos,
        exact_tails: tails,
        exact_levels: masses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesTrend {
    Converges,
    Diverges,
    Unclear,
}

/// Declared heuristic on `Σ f₁ f₄ f₅(f₃)`: the ratio of the second half of
/// the partial sum to the first. At most 0.1 reads as convergent, at least
/// 0.3 as divergent.
pub fn series_trend(terms: &[f64]) -> (SeriesTrend, f64) {
    let half = terms.len() / 2;
    let head: f64 = terms[..half].iter().sum();
    let tail: f64 = terms[half..].iter().sum();
    let r = if head > 0.0 { tail / head } else { f64::INFINITY };
    let t = if r <= 0.1 {
        SeriesTrend::Converges
    } else if r >= 0.3 {
        SeriesTrend::Diverges
    } else {
        SeriesTrend::Unclear
    };
    (t, r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    MeasureZero,
    PositiveMeasure,
    HypothesesViolated { condition: u8, detail: String },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::MeasureZero => "measure-zero",
            Verdict::PositiveMeasure => "positive-measure",
            Verdict::HypothesesViolated { .. } => "hypotheses-violated",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub name: String,
    pub verdict: Verdict,
    pub terms: Vec<f64>,
    pub series: SeriesTrend,
    pub series_ratio: f64,
    pub hypotheses: HypReport,
    pub truncation: Truncation,
    /// `1/(c⁸ c″^{log c / log c′ + 1})`, the guaranteed lower bound under [B].
    pub lower_bound: f64,
}

/// Measure-zero needs a convergent trend, part [A] and a tenfold drop of the
/// tail mass across the second half of the levels. Positive-measure needs a
/// divergent trend, (1)–(7), and tail masses and the Chung–Erdős ratio at or
/// above the guaranteed lower bound. Anything else is inconclusive.
pub fn verdict(inst: &BcInstance, budget: usize) -> Result<VerdictReport, BcError> {
    let hyp = check_hypotheses(inst)?;
    let tr = truncation(inst, budget)?;
    let terms: Vec<f64> = inst.levels().map(|n| to_f64(&inst.rates.term(n))).collect();
    let (series, ratio) = series_trend(&terms);
    let c = hyp.c.max(1.0);
    let lower_bound = 1.0 / (libm::pow(c, 8.0) * libm::pow(hyp.c_second, libm::log(c) + 1.0));
    let violated = |cr: &CondResult| Verdict::HypothesesViolated { condition: cr.number, detail: cr.detail.clone() };
    // (1) and the upper halves of (4) and (5) are needed on either side.
    let shared = if !hyp.holds(1) {
        Some(&hyp.conditions[0])
    } else if hyp.c_upper > inst.c_max {
        Some(&hyp.conditions[if hyp.holds(4) { 4 } else { 3 }])
    } else {
        None
    };
    let v = match (shared, series) {
        (Some(cr), _) => violated(cr),
        (None, SeriesTrend::Unclear) => {
            Verdict::Inconclusive { reason: format!("series ratio {ratio:.3} between thresholds") }
        }
        (None, SeriesTrend::Converges) => {
            let mid = tr.exact_tails.len() / 2;
            let last = tr.exact_tails.last().expect("at least one level");
            let drop = tr.exact_tails[mid] >= last * BigRational::from_integer(10.into());
            let monotone = tr.exact_tails.windows(2).all(|w| w[0] >= w[1]);
            if drop && monotone {
                Verdict::MeasureZero
            } else {
                Verdict::Inconclusive { reason: "tail masses do not drop tenfold".into() }
            }
        }
        (None, SeriesTrend::Diverges) => match hyp.first_failure() {
            Some(cr) => violated(cr),
            None => {
                let tails_ok = tr.exact_tails.iter().all(|t| to_f64(t) >= lower_bound);
                if tails_ok && tr.chung_erdos >= lower_bound {
                    Verdict::PositiveMeasure
                } else {
                    Verdict::Inconclusive { reason: "truncated masses fall below the guaranteed bound".into() }
                }
            }
        },
    };
    Ok(VerdictReport {
        name: inst.name.clone(),
        verdict: v,
        terms,
        series,
        series_ratio: ratio,
        hypotheses: hyp,
        truncation: tr,
        lower_bound,
    })
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qpow(q: u32, e: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(e as u32))
}

/// Rounds `g(t)` up to the grid, noting it when that moves `ε` down.
fn snap(g: f64, t: u64, notes: &mut Vec<String>) -> i64 {
    let m = libm::ceil(g - 1e-12);
    if libm::fabs(m - g) > 1e-12 {
        notes.push(format!("g({t}) = {g} snapped up to {m}"));
    }
    m as i64
}

/// Code of `w · l^∞` where `l` continues the word: the period is the code of
/// `l` following itself.
fn word_anchor(w: &[u32], l: u32) -> Anchor {
    let mut x = w.to_vec();
    x.extend([l, l]);
    let code = word_to_code(&x).0;
    Anchor { prefix: code[..w.len() + 1].to_vec(), period: alloc::vec![code[w.len() + 1]] }
}

/// Spiraling instance on `F_k` around the axis `C₀` of `x₀`: items are the
/// nontrivial double cosets `r`, levels `⌊D(r)/N⌋`, sets `N_r(ε)`, and
/// `f₁ = e^{δnN}`, `f₂ = c₂e^{−nN}`, `f₃ = f₂ e^{−g(nN)}`, `f₄ = c₂^{−δ}`,
/// `f₅(ε) = ε^δ` with `δ = log(2k−1)`, `c₂ = e^{−N}`.
pub fn spiral_instance(
    name: &str,
    k: u32,
    big_n: usize,
    n_max: usize,
    g: &dyn Fn(u64) -> f64,
    budget: usize,
) -> Result<BcInstance, BcError> {
    let q = branching(k);
    let reps = cayley::double_cosets(k, (n_max + 1) * big_n - 1, budget).map_err(|_| BcError::Budget(budget))?;
    let items = reps
        .iter()
        .filter(|w| !w.is_empty())
        .map(|w| BcItem {
            label: word_label(w),
            level: w.len() / big_n,
            anchors: alloc::vec![word_anchor(w, 0), word_anchor(w, 1)],
        })
        .collect();
    let mut notes = alloc::vec![format!("F_{k}, N = {big_n}, c2 = e^-{big_n}; trivial double coset excluded")];
    let levels = 0..=n_max;
    let m2: Vec<i64> = levels.clone().map(|n| ((n + 1) * big_n) as i64).collect();
    let m3 = levels.clone().map(|n| m2[n] + snap(g((n * big_n) as u64), (n * big_n) as u64, &mut notes)).collect();
    Ok(BcInstance {
        name: name.into(),
        space: cayley::quotient_space(k),
        items,
        rates: RateFns {
            f1: levels.clone().map(|n| qpow(q, n * big_n)).collect(),
            m2,
            m3,
            f4: levels.map(|_| qpow(q, big_n)).collect(),
            f5_base: int(q as u64),
        },
        first_level: 1,
        n_max,
        span: 4,
        c_max: 20.0,
        notes,
    })
}

/// Approximation by the orbit of the base vertex of the Cayley tree of `F_k`:
/// level `n` holds the words of length `t_n`, with visual balls around the
/// end `γ · l^∞` (`l` the last letter of `γ`). Rates `f₁ = e^{δt_n}`,
/// `f₂ = e^{−t_n}`, `f₃ = f₂e^{−g(t_n)}`, `f₄ = 1`, `f₅(ε) = ε^δ`.
pub fn point_instance(name: &str, k: u32, levels: &[u64], g: &dyn Fn(u64) -> f64) -> BcInstance {
    let q = branching(k);
    let mut notes = alloc::vec![format!("F_{k} acting on its Cayley tree, c3 = 1")];
    let mut items = Vec::new();
    for (n, &t) in levels.iter().enumerate() {
        for w in reduced_words(k, t as usize) {
            let l = *w.last().expect("t ≥ 1");
            items.push(BcItem { label: word_label(&w), level: n, anchors: alloc::vec![word_anchor(&w[..w.len() - 1], l)] });
        }
    }
    let m3: Vec<i64> = levels.iter().map(|&t| t as i64 + snap(g(t), t, &mut notes)).collect();
    for n in 1..levels.len() {
        if (levels[n] as i64) < m3[n - 1] {
            notes.push(format!("t_{n} < t_{} + g(t_{})", n - 1, n - 1));
        }
    }
    BcInstance {
        name: name.into(),
        space: CylSpace::visual(q),
        items,
        rates: RateFns {
            f1: levels.iter().map(|&t| qpow(q, t as usize)).collect(),
            m2: levels.iter().map(|&t| t as i64).collect(),
            m3,
            f4: levels.iter().map(|_| BigRational::one()).collect(),
            f5_base: int(q as u64),
        },
        first_level: 0,
        n_max: levels.len() - 1,
        span: 4,
        c_max: 20.0,
        notes,
    }
}

/// One item per level, the balls around the end `0^∞` of the
/// `(q+1)`-regular tree: `A_n` is a decreasing sequence of cylinders.
pub fn nested_instance(name: &str, q: u32, n_max: usize) -> BcInstance {
    let ray = Anchor { prefix: Vec::new(), period: alloc::vec![0] };
    BcInstance {
        name: name.into(),
        space: CylSpace::visual(q),
        items: (1..=n_max).map(|n| BcItem { label: format!("0^{n}"), level: n, anchors: alloc::vec![ray.clone()] }).collect(),
        rates: RateFns {
            f1: (0..=n_max).map(|_| BigRational::one()).collect(),
            m2: (0..=n_max as i64).collect(),
            m3: (0..=n_max as i64).collect(),
            f4: (0..=n_max).map(|_| BigRational::new(BigInt::from(q), BigInt::from(q + 1))).collect(),
            f5_base: int(q as u64),
        },
        first_level: 1,
        n_max,
        span: 4,
        c_max: 20.0,
        notes: alloc::vec!["nested balls around one end".into()],
    }
}

/// All reduced words of length `t` in `F_k`.
pub fn reduced_words(k: u32, t: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut w = Vec::with_capacity(t);
    fn rec(k: u32, t: usize, w: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if w.len() == t {
            out.push(w.clone());
            return;
        }
        for l in 0..2 * k {
            if w.last() == Some(&cayley::inv(l)) {
                continue;
            }
            w.push(l);
            rec(k, t, w, out);
            w.pop();
        }
    }
    rec(k, t, &mut w, &mut out);
    out
}

/// `a A b B c C …` for letters `0 1 2 3 4 5 …`.
pub fn word_label(w: &[u32]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|&l| {
            let c = (b'a' + (l / 2) as u8) as char;
            if l % 2 == 0 {
                c
            } else {
                c.to_ascii_uppercase()
            }
        })
        .collect()
}

/// Whether the limsup set is null or not, as known independently of the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truth {
    Null,
    Positive,
}

pub struct Fixture {
    pub instance: BcInstance,
    pub truth: Truth,
}

/// The six reference instances. Ground truth: the nested balls shrink to a
/// point; the `g ≡ 1` orbit instance has independent levels of mass `1/3`;
/// the spiraling and orbit instances follow the convergence or divergence
/// of `Σ f(t_n)^δ`.
pub fn fixtures() -> Vec<Fixture> {
    let f = |instance, truth| Fixture { instance, truth };
    let budget = 1 << 22;
    alloc::vec![
        f(spiral_instance("spiral-f2-exp", 2, 1, 10, &|t| t as f64, budget).expect("budget"), Truth::Null),
        f(nested_instance("nested-q3", 3, 20), Truth::Null),
        f(point_instance("orbit-f2-exp", 2, &(1..=8).collect::<Vec<_>>(), &|t| t as f64), Truth::Null),
        f(spiral_instance("spiral-f2-const", 2, 1, 10, &|_| 0.0, budget).expect("budget"), Truth::Positive),
        f(point_instance("orbit-f2-const", 2, &(1..=9).collect::<Vec<_>>(), &|_| 1.0), Truth::Positive),
        f(spiral_instance("spiral-f3-const", 3, 1, 6, &|_| 0.0, budget).expect("budget"), Truth::Positive),
    ]
}
