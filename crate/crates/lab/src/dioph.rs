//! Approximation of Haar-random points by the orbit of a quadratic irrational.

use horolab_core::exactnum::{embed_ratfunc, sample_haar_with, Laurent, Poly, RatFunc};
use horolab_core::quadratic::{orbit_enumerate, OrbitConfig, QuadIrr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Phi, RunConfig};
use crate::report::{median, num, Provenance, Report, Table};
use crate::LabError;

/// Whether the digits end in a short repeating block, as rational points do.
pub fn eventually_periodic(digits: &[u32], max_period: usize, span: usize) -> bool {
    if digits.len() < span + max_period {
        return false;
    }
    let tail = &digits[digits.len() - span..];
    (1..=max_period).any(|p| tail.windows(p + 1).all(|w| w[0] == w[p]))
}

/// `log_q |x − β|`, or the bound given by the known digits.
fn dist_exp(x: &Laurent, beta: &Laurent) -> i64 {
    match x.diff_valuation(beta) {
        Ok(v) | Err(v) => v,
    }
}

struct Sample {
    name: String,
    rational: bool,
    /// Best `log_q |x − β|` per shell (the largest valuation).
    best: Vec<i64>,
}

/// Per-sample minima of `(h/φ(h))|x − β|` over orbit shells of height `q^j`.
///
/// CSV: `sample,seed,phi,shell,dist_exp,shell_min,running_min,status,label`,
/// with `dist_exp = log_q` of the closest approach inside the shell.
pub fn dioph(cfg: &RunConfig) -> Result<Report, LabError> {
    let m = &cfg.model;
    let q = m.q;
    let alpha = QuadIrr::default_base(q);
    let ocfg = OrbitConfig { h_max_log_q: m.h_max, d_max: m.orbit_cap, budget: m.budget };
    let orbit = orbit_enumerate(&alpha, &ocfg);
    if orbit.budget_exhausted {
        return Err(LabError::Budget(format!("orbit enumeration stored {} elements", m.budget)));
    }
    let shells: Vec<i64> = (m.h_min..=m.h_max).collect();
    let by_shell: Vec<Vec<Laurent>> = shells
        .iter()
        .map(|&j| orbit.elements.iter().filter(|b| b.height_log_q() == j).map(|b| b.expand(m.prec + 2)).collect())
        .collect();

    let mut points: Vec<(String, Laurent)> = (0..m.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            (i.to_string(), sample_haar_with(q, 1, m.prec, &mut rng))
        })
        .collect();
    if m.rational_fixture {
        let r = RatFunc::new(Poly::new(q, &[1]), Poly::new(q, &[1, 1])).expect("nonzero denominator");
        points.push(("rational".into(), embed_ratfunc(&r, m.prec)));
    }
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|(name, x)| {
            let digits: Vec<u32> = (1..=m.prec as i64).map(|i| x.coeff(i).unwrap_or(0)).collect();
            let best = by_shell
                .iter()
                .map(|els| els.iter().map(|b| dist_exp(x, b)).max().unwrap_or(i64::MIN))
                .collect();
            Sample { name: name.clone(), rational: eventually_periodic(&digits, 8, 24), best }
        })
        .collect();

    let mut tab = Table::new(&[
        "sample", "seed", "phi", "shell", "dist_exp", "shell_min", "running_min", "status", "label",
    ]);
    let mut rep_rows: Vec<(Phi, Vec<f64>, Vec<f64>)> = Vec::new();
    for &phi in &cfg.rate.phi {
        let mut shell_vals = vec![Vec::new(); shells.len()];
        let mut run_vals = vec![Vec::new(); shells.len()];
        for s in &samples {
            let mut running = f64::INFINITY;
            for (si, &j) in shells.iter().enumerate() {
                let d = s.best[si];
                let v = if d == i64::MIN { f64::INFINITY } else { phi.normalized(q, j, d) };
                running = running.min(v);
                if !s.rational {
                    shell_vals[si].push(v);
                    run_vals[si].push(running);
                }
                tab.push(vec![
                    s.name.clone(),
                    cfg.seed.to_string(),
                    phi.to_string(),
                    j.to_string(),
                    d.to_string(),
                    num(v),
                    num(running),
                    if s.rational { "excluded-rational" } else { "ok" }.into(),
                    Provenance::Derived.as_str().into(),
                ]);
            }
        }
        let med = |vs: &Vec<Vec<f64>>| vs.iter().map(|v| median(v).unwrap_or(f64::NAN)).collect::<Vec<f64>>();
        rep_rows.push((phi, med(&shell_vals), med(&run_vals)));
    }

    let mut rep = Report::new(cfg, tab);
    rep.stat("haar_normalization", "X⁻¹F_q[[X⁻¹]] has mass 1");
    rep.stat("shells", &shells);
    rep.stat("orbit_elements", orbit.elements.len());
    // Elements not found are only absent within the budget and degree cap.
    rep.stat("orbit_complete", orbit.complete);
    rep.stat("orbit_cap_binding", orbit.cap_binding);
    rep.stat("shell_sizes", by_shell.iter().map(|s| s.len()).collect::<Vec<_>>());
    let excluded: Vec<&str> = samples.iter().filter(|s| s.rational).map(|s| s.name.as_str()).collect();
    rep.stat("excluded_rational", &excluded);
    if m.rational_fixture {
        rep.check("rational-fixture-flagged", excluded.contains(&"rational"), "1/(X+1) is excluded");
    }
    for (phi, shell_med, run_med) in &rep_rows {
        let key = phi.to_string();
        rep.stat(&format!("median_shell_min[{key}]"), shell_med);
        rep.stat(&format!("median_running_min[{key}]"), run_med);
        let (first, last) = (shell_med[0], shell_med[shell_med.len() - 1]);
        if phi.divergent() {
            let (a, b) = (run_med[0], run_med[run_med.len() - 1]);
            let mono = run_med.windows(2).all(|w| w[1] <= w[0]);
            rep.check(
                &format!("decreasing[{key}]"),
                mono && a >= 2.0 * b,
                format!("running-min medians {run_med:?}, first/last = {}", a / b),
            );
        } else {
            let mono = shell_med.windows(2).all(|w| w[1] >= w[0]);
            rep.check(
                &format!("increasing[{key}]"),
                mono && last > first && first > 0.0,
                format!("per-shell medians {shell_med:?}"),
            );
        }
    }
    Ok(rep)
}
