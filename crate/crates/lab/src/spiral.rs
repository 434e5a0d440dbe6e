//! Random geodesics on a finite graph: spiralling around a cycle and
//! approaching a vertex.

use std::fs;

use horolab_core::flow::{
    closest_approach, khintchine_event, loglaw_window, penetration, perron, sample_path, Cycle, ParryChain,
    QuotientGraph, Rate,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{median, num, opt, Provenance, Report, Table};
use crate::LabError;

/// Perron tolerance for every run.
pub const PERRON_TOL: f64 = 1e-13;

/// `K<n>`, `petersen`, or an edge-list file.
pub fn load_graph(spec: &str) -> Result<QuotientGraph, LabError> {
    if spec.eq_ignore_ascii_case("petersen") {
        return Ok(QuotientGraph::petersen());
    }
    if let Some(n) = spec.strip_prefix('K').and_then(|n| n.parse::<u32>().ok()) {
        if n < 4 {
            return Err(LabError::Invalid(format!("K{n} has degree below 3")));
        }
        return Ok(QuotientGraph::complete(n));
    }
    let text = fs::read_to_string(spec).map_err(|e| LabError::Invalid(format!("graph file {spec}: {e}")))?;
    QuotientGraph::parse_edge_list(&text).map_err(|e| LabError::Invalid(format!("graph {spec}: {e}")))
}

fn chain(g: &QuotientGraph) -> Result<ParryChain, LabError> {
    perron(g, PERRON_TOL).map_err(|e| LabError::Invalid(format!("graph: {e}")))
}

fn setup(cfg: &RunConfig) -> Result<(QuotientGraph, ParryChain, Cycle), LabError> {
    let g = load_graph(&cfg.model.graph)?;
    let ch = chain(&g)?;
    let cy = Cycle::parse(&g, &cfg.model.cycle).map_err(|e| LabError::Invalid(format!("cycle: {e}")))?;
    Ok((g, ch, cy))
}

/// Penetration depth over `log t` around the target cycle.
///
/// CSV: `path,seed,t,window_lo,window_hi,runs,statistic,target,label`.
pub fn spiral_loglaw(cfg: &RunConfig) -> Result<Report, LabError> {
    let (g, ch, cy) = setup(cfg)?;
    let (lo, hi) = cfg.window();
    let t = cfg.model.t;
    let target = 1.0 / ch.entropy;
    let per_path: Vec<(u64, Option<f64>, bool)> = (0..cfg.model.n_paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_path(&ch, t as usize, cfg.seed, i);
            let rec = penetration(&path.darts, &cy);
            (rec.runs.len() as u64, loglaw_window(&rec, lo, hi), path.defect(&g).is_none())
        })
        .collect();
    let mut tab = Table::new(&["path", "seed", "t", "window_lo", "window_hi", "runs", "statistic", "target", "label"]);
    for (i, (runs, s, _)) in per_path.iter().enumerate() {
        tab.push(vec![
            i.to_string(),
            cfg.seed.to_string(),
            t.to_string(),
            lo.to_string(),
            hi.to_string(),
            runs.to_string(),
            opt(*s),
            num(target),
            Provenance::Paper.as_str().into(),
        ]);
    }
    let stats: Vec<f64> = per_path.iter().filter_map(|p| p.1).collect();
    let med = median(&stats);
    let mut rep = Report::new(cfg, tab);
    rep.target("one_over_entropy", target, Provenance::Paper);
    rep.stat("lambda", ch.lambda);
    rep.stat("entropy", ch.entropy);
    rep.stat("window", [lo, hi]);
    rep.stat("median", med);
    rep.stat("paths_without_runs", per_path.len() - stats.len());
    rep.check(
        "non-backtracking",
        per_path.iter().all(|p| p.2),
        "every sampled path follows darts head to tail without reversing",
    );
    let rel = med.map(|m| (m - target).abs() / target);
    rep.check(
        "median-near-target",
        rel.is_some_and(|r| r <= 0.15),
        format!("median {} vs 1/h = {target:.6}, relative error {}", opt(med), opt(rel)),
    );
    Ok(rep)
}

fn rates(cfg: &RunConfig, h: f64) -> Vec<(String, f64, Rate)> {
    let mut kappas = cfg.rate.kappa.clone();
    kappas.sort_by(f64::total_cmp);
    kappas.dedup();
    let mut out = vec![("zero".to_string(), 0.0, Rate::Zero)];
    out.extend(kappas.into_iter().map(|k| ("kappa-log".to_string(), k, Rate::KappaLog(k / h))));
    out.push(("infinite".into(), f64::INFINITY, Rate::Infinite));
    out
}

/// Event rates `p_n ≥ κ log(1+t_n)` in `[T/2, T]` across a κ sweep.
///
/// CSV: `rate,kappa_h,threshold_at_t,events,n_paths,fraction,label`, with κ
/// in units of `1/h`.
pub fn spiral_khintchine(cfg: &RunConfig) -> Result<Report, LabError> {
    let (_, ch, cy) = setup(cfg)?;
    let t = cfg.model.t;
    let rs = rates(cfg, ch.entropy);
    let hits: Vec<Vec<bool>> = (0..cfg.model.n_paths)
        .into_par_iter()
        .map(|i| {
            let rec = penetration(&sample_path(&ch, t as usize, cfg.seed, i).darts, &cy);
            rs.iter().map(|r| khintchine_event(&rec, r.2, t)).collect()
        })
        .collect();
    let n = cfg.model.n_paths;
    let mut tab = Table::new(&["rate", "kappa_h", "threshold_at_t", "events", "n_paths", "fraction", "label"]);
    let mut fractions = Vec::new();
    for (j, (name, k, r)) in rs.iter().enumerate() {
        let events = hits.iter().filter(|h| h[j]).count() as u64;
        let frac = events as f64 / n as f64;
        fractions.push((*k, frac));
        tab.push(vec![
            name.clone(),
            num(*k),
            num(r.threshold(t)),
            events.to_string(),
            n.to_string(),
            num(frac),
            Provenance::Derived.as_str().into(),
        ]);
    }
    let mut rep = Report::new(cfg, tab);
    rep.target("critical_kappa_h", 1.0, Provenance::Paper);
    rep.stat("entropy", ch.entropy);
    rep.stat("window", [t / 2, t]);
    rep.stat("fractions", &fractions);
    let zero = fractions[0].1;
    let inf = fractions[fractions.len() - 1].1;
    rep.check("zero-rate-always", zero == 1.0, format!("g = 0 gives {zero}"));
    rep.check("infinite-rate-never", inf == 0.0, format!("g = ∞ gives {inf}"));
    let mono = fractions.windows(2).all(|w| w[1].1 <= w[0].1);
    rep.check("monotone-in-kappa", mono, "event rate does not increase with κ");
    let at = |k: f64| fractions.iter().find(|f| f.0 == k).map(|f| f.1);
    if let (Some(a), Some(b)) = (at(0.5), at(2.0)) {
        rep.stat("separation", a - b);
        rep.check("separation", a - b >= 0.6, format!("rate {a} at κ = 0.5/h vs {b} at κ = 2/h"));
    }
    Ok(rep)
}

/// How long a geodesic shadows the designated ray from a vertex, over `log t`.
///
/// CSV: `path,seed,t,window_lo,window_hi,visits,statistic,statistic_half,target,label`;
/// `statistic_half` uses the window `[lo, hi/2]`.
pub fn approx_point(cfg: &RunConfig) -> Result<Report, LabError> {
    let g = load_graph(&cfg.model.graph)?;
    let ch = chain(&g)?;
    let x0 = g
        .vertex_id(&cfg.model.vertex)
        .ok_or_else(|| LabError::Invalid(format!("no vertex {:?} in the graph", cfg.model.vertex)))?;
    let (lo, hi) = cfg.window();
    let half = (hi / 2).max(lo);
    let t = cfg.model.t;
    let target = 1.0 / ch.entropy;
    let per_path: Vec<(u64, Option<f64>, Option<f64>)> = (0..cfg.model.n_paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_path(&ch, t as usize, cfg.seed, i);
            let (s, visits) = closest_approach(&g, &path.darts, x0, lo, hi);
            let (sh, _) = closest_approach(&g, &path.darts, x0, lo, half);
            (visits, s, sh)
        })
        .collect();
    let mut tab = Table::new(&[
        "path", "seed", "t", "window_lo", "window_hi", "visits", "statistic", "statistic_half", "target", "label",
    ]);
    for (i, (v, s, sh)) in per_path.iter().enumerate() {
        tab.push(vec![
            i.to_string(),
            cfg.seed.to_string(),
            t.to_string(),
            lo.to_string(),
            hi.to_string(),
            v.to_string(),
            opt(*s),
            opt(*sh),
            num(target),
            Provenance::Extrapolated.as_str().into(),
        ]);
    }
    let stats: Vec<f64> = per_path.iter().filter_map(|p| p.1).collect();
    let med = median(&stats);
    let mut rep = Report::new(cfg, tab);
    rep.target("one_over_entropy", target, Provenance::Extrapolated);
    rep.stat("window", [lo, hi]);
    rep.stat("median", med);
    let rel = med.map(|m| (m - target).abs() / target);
    rep.stat("relative_error", rel);
    rep.check(
        "median-near-target",
        rel.is_some_and(|r| r <= 0.20),
        format!("median {} vs extrapolated 1/h = {target:.6}", opt(med)),
    );
    let widen = per_path.iter().all(|p| match (p.1, p.2) {
        (Some(a), Some(b)) => a >= b,
        (None, Some(_)) => false,
        _ => true,
    });
    rep.check("window-widening-monotone", widen, format!("sup over [{lo}, {hi}] ≥ sup over [{lo}, {half}]"));
    Ok(rep)
}
