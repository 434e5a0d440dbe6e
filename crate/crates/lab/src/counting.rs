//! Double cosets of a cyclic subgroup in a free group: growth and the measure
//! of their neighbourhoods.

use horolab_core::bcengine::word_label;
use horolab_core::treespace::cayley::{branching, double_coset_counts, double_cosets, neighborhood};
use horolab_core::treespace::{CylinderUnion, TreeError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::config::RunConfig;
use crate::report::{num, Provenance, Report, Table};
use crate::LabError;

/// Representatives with first and last letter off `x₀^{±1}`, counted by
/// length through the last letter alone.
pub fn transfer_counts(k: u32, max_len: usize) -> Vec<u64> {
    let n = 2 * k as usize;
    let mut out = vec![1u64];
    let mut last = vec![0u64; n];
    for slot in last.iter_mut().skip(2) {
        *slot = 1;
    }
    for len in 1..=max_len {
        if len > 1 {
            let mut next = vec![0u64; n];
            for (p, &c) in last.iter().enumerate() {
                for (l, slot) in next.iter_mut().enumerate() {
                    if l != (p ^ 1) {
                        *slot += c;
                    }
                }
            }
            last = next;
        }
        out.push(last[2..].iter().sum());
    }
    out
}

/// Representatives with depth in `[lo, hi)`; zero for an empty range.
pub fn window_count(counts: &[u64], lo: usize, hi: usize) -> u64 {
    counts.iter().enumerate().filter(|(d, _)| *d >= lo && *d < hi).map(|(_, c)| c).sum()
}

/// Least-squares slope.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn tree_err(e: TreeError) -> LabError {
    match e {
        TreeError::Budget(b) => LabError::Budget(format!("more than {b} double cosets")),
        e => LabError::Invalid(e.to_string()),
    }
}

/// Counts per depth window `[nN, (n+1)N)` and their growth rate.
///
/// CSV: `window_lo,window_hi,count,log_count,label`.
pub fn coset_count(cfg: &RunConfig) -> Result<Report, LabError> {
    let (k, dmax, nn) = (cfg.model.k, cfg.model.d_max as usize, cfg.model.window_n as usize);
    let counts = double_coset_counts(k, dmax);
    let oracle = transfer_counts(k, dmax);
    let mut tab = Table::new(&["window_lo", "window_hi", "count", "log_count", "label"]);
    let mut pts = Vec::new();
    let mut lo = 0;
    while lo + nn <= dmax + 1 {
        let c = window_count(&counts, lo, lo + nn);
        let lc = (c as f64).ln();
        if lo > 0 {
            pts.push((lo as f64, lc));
        }
        tab.push(vec![lo.to_string(), (lo + nn).to_string(), c.to_string(), num(lc), "derived".into()]);
        lo += nn;
    }
    let target = (branching(k) as f64).ln();
    let mut rep = Report::new(cfg, tab);
    rep.target("growth_rate", target, Provenance::Paper);
    rep.stat("counts", &counts);
    rep.check("enumeration-matches-transfer", counts == oracle, "direct enumeration vs last-letter recursion");
    if pts.len() >= 2 {
        let slope = fit_slope(&pts);
        rep.stat("slope", slope);
        rep.check(
            "slope-near-growth-rate",
            (slope / target - 1.0).abs() <= 0.10,
            format!("slope {slope:.6} vs log(2k−1) = {target:.6}"),
        );
    } else {
        rep.check("slope-near-growth-rate", false, "fewer than two nonempty windows past depth 0");
    }
    Ok(rep)
}

/// Masses of `ε`-neighbourhoods `ε = e^{−m}` of each double coset, scaled by
/// `ε^{−δ}`, and disjointness of each depth window at radius `e^{−(n+1)N}`.
///
/// CSV: `word,depth,m,mass,normalized,normalized_f64,label`.
pub fn measure_band(cfg: &RunConfig) -> Result<Report, LabError> {
    let (k, dmax, nn) = (cfg.model.k, cfg.model.d_max as usize, cfg.model.window_n as usize);
    let b = BigInt::from(branching(k));
    let reps = double_cosets(k, dmax, cfg.model.budget).map_err(tree_err)?;
    let mut tab = Table::new(&["word", "depth", "m", "mass", "normalized", "normalized_f64", "label"]);
    let mut band: Option<(BigRational, BigRational)> = None;
    for w in reps.iter().filter(|w| !w.is_empty()) {
        let d = w.len() as i64;
        // ε ≤ e · e^{−D}.
        for m in (d - 1).max(1)..=d + 4 {
            let (_, mass) = neighborhood(k, w, -2 * m).map_err(tree_err)?;
            let r = &mass * BigRational::from_integer(b.pow(m as u32));
            band = Some(match band {
                None => (r.clone(), r.clone()),
                Some((lo, hi)) => (lo.min(r.clone()), hi.max(r.clone())),
            });
            tab.push(vec![
                word_label(w),
                d.to_string(),
                m.to_string(),
                mass.to_string(),
                r.to_string(),
                num(r.to_f64().unwrap_or(f64::NAN)),
                "derived".into(),
            ]);
        }
    }
    let mut rep = Report::new(cfg, tab);
    let Some((lo, hi)) = band else {
        rep.check("band", false, "no nontrivial double cosets");
        return Ok(rep);
    };
    let c = hi.to_f64().unwrap_or(f64::INFINITY).max(lo.recip().to_f64().unwrap_or(f64::INFINITY));
    rep.target("band_constant_bound", 20.0, Provenance::Derived);
    rep.stat("band", [lo.to_string(), hi.to_string()]);
    rep.stat("c", c);
    rep.check("band", !lo.is_zero() && c <= 20.0, format!("mass·ε^(−δ) in [{lo}, {hi}], c = {c}"));
    let mut failures = Vec::new();
    let mut n = 0;
    while (n + 1) * nn <= dmax {
        let m = ((n + 1) * nn) as i64;
        let mut cyls = Vec::new();
        for w in reps.iter().filter(|w| !w.is_empty() && w.len() / nn == n) {
            cyls.extend(neighborhood(k, w, -2 * m).map_err(tree_err)?.0.cylinders().to_vec());
        }
        if CylinderUnion::new(cyls).is_err() {
            failures.push(n);
        }
        n += 1;
    }
    rep.stat("disjoint_windows", n);
    rep.check(
        "disjoint-at-radius",
        failures.is_empty(),
        format!("{n} windows of width {nn} checked, overlaps in {failures:?}"),
    );
    Ok(rep)
}
