//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use horolab::config::{Experiment, Overrides, RunConfig};
use horolab::geom::{self, Suite};
use horolab::report::Report;
use horolab::run;

fn config(exp: Experiment) -> RunConfig {
    let text = match exp {
        Experiment::SpiralLoglaw => include_str!("../configs/spiral-loglaw.toml"),
        Experiment::SpiralKhintchine => include_str!("../configs/spiral-khintchine.toml"),
        Experiment::Dioph => include_str!("../configs/dioph.toml"),
        Experiment::ApproxPoint => include_str!("../configs/approx-point.toml"),
        Experiment::CosetCount => include_str!("../configs/coset-count.toml"),
        Experiment::MeasureBand => include_str!("../configs/measure-band.toml"),
        Experiment::BcRun => include_str!("../configs/bc-run.toml"),
        Experiment::GeomValidate => include_str!("../configs/geom-validate.toml"),
    };
    RunConfig::load(exp, Some(text), &Overrides::default()).expect("shipped config is valid")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn suites(ss: &[Suite], limit: Option<Duration>, took: Duration) -> Outcome {
    let pass = ss.iter().all(Suite::passed) && limit.is_none_or(|l| took <= l);
    let mut detail: Vec<String> = ss
        .iter()
        .map(|s| format!("{} {}/{} ok, max error {:.2e}", s.name, s.samples - s.failures, s.samples, s.max_error))
        .collect();
    if let Some(l) = limit {
        detail.push(format!("limit {}s", l.as_secs()));
    }
    Outcome { pass, detail: detail.join("; ") }
}

/// Every check of the report, or only the named ones.
fn checks(rep: &Result<Report, horolab::LabError>, names: &[&str], limit: Option<Duration>, took: Duration) -> Outcome {
    let rep = match rep {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let picked: Vec<_> = rep
        .summary
        .checks
        .iter()
        .filter(|c| names.is_empty() || names.iter().any(|n| c.name == *n))
        .collect();
    let pass = !picked.is_empty() && picked.iter().all(|c| c.pass) && limit.is_none_or(|l| took <= l);
    let mut detail: Vec<String> = if names.is_empty() {
        let ok = picked.iter().filter(|c| c.pass).count();
        let mut d = vec![format!("{ok}/{} checks pass", picked.len())];
        d.extend(picked.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)));
        d
    } else {
        picked.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect()
    };
    if let Some(l) = limit {
        detail.push(format!("limit {}s", l.as_secs()));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn scratch(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("horolab-acceptance-{}-{tag}", std::process::id()))
}

/// Runs the config twice, writes both reports and compares the CSV files.
fn reproducible(exp: Experiment) -> Outcome {
    let cfg = config(exp);
    let mut sizes = Vec::new();
    let mut bytes = Vec::new();
    for tag in ["a", "b"] {
        let dir = scratch(tag);
        let written = run(&cfg).and_then(|r| r.write(&dir));
        match written.map(|(csv, _)| std::fs::read(csv)) {
            Ok(Ok(b)) => {
                sizes.push(b.len());
                bytes.push(b);
            }
            Ok(Err(e)) => return Outcome { pass: false, detail: e.to_string() },
            Err(e) => return Outcome { pass: false, detail: e.to_string() },
        }
        let _ = std::fs::remove_dir_all(&dir);
    }
    let same = bytes[0] == bytes[1];
    Outcome { pass: same, detail: format!("{exp}: two runs, CSV sizes {sizes:?}, identical: {same}") }
}

fn main() -> ExitCode {
    let min = |m: u64| Some(Duration::from_secs(60 * m));
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let gcfg = config(Experiment::GeomValidate);
    let (n, seed) = (gcfg.model.samples, gcfg.seed);

    let (s, t) = timed(|| vec![geom::dc_formula_trees(n, seed)]);
    results.push((1, "exact d_C equivalence on trees", suites(&s, min(1), t), t));

    let (s, t) = timed(|| vec![geom::hyperbolic_closed_form(100, seed + 1), geom::closed_form_special_values()]);
    results.push((2, "hyperbolic closed form", suites(&s, min(1), t), t));

    let (s, t) = timed(|| {
        vec![
            geom::tree_bounds(n, seed + 2),
            geom::tree_scaling(n, seed + 3),
            geom::hyperbolic_bounds(n, seed + 4),
            geom::triangle_witness(),
        ]
    });
    results.push((3, "bounds, scaling and triangle witness", suites(&s, None, t), t));

    let (s, t) = timed(|| vec![geom::entropy()]);
    results.push((4, "entropy of regular graphs", suites(&s, None, t), t));

    let (r, t) = timed(|| run(&config(Experiment::SpiralLoglaw)));
    results.push((5, "logarithm law", checks(&r, &["median-near-target"], min(5), t), t));

    let (r, t) = timed(|| run(&config(Experiment::SpiralKhintchine)));
    results.push((6, "Khintchine separation", checks(&r, &["separation"], None, t), t));

    let (r, t) = timed(|| run(&config(Experiment::CosetCount)));
    results.push((7, "double-coset counting", checks(&r, &["slope-near-growth-rate"], min(5), t), t));

    let (r, t) = timed(|| run(&config(Experiment::MeasureBand)));
    results.push((8, "measure band and disjointness", checks(&r, &["band", "disjoint-at-radius"], None, t), t));

    let (r, t) = timed(|| run(&config(Experiment::BcRun)));
    results.push((9, "Borel–Cantelli engine", checks(&r, &[], None, t), t));

    let (r, t) = timed(|| run(&config(Experiment::Dioph)));
    results.push((10, "Diophantine trend", checks(
        &r,
        &["decreasing[log-reciprocal]", "increasing[power:1]", "decreasing[power:0]", "rational-fixture-flagged"],
        min(10),
        t,
    ), t));

    let (s, t) = timed(|| vec![geom::height_depth_suite(gcfg.model.q)]);
    results.push((11, "height and depth", suites(&s, None, t), t));

    let (o, t) = timed(|| {
        let a = reproducible(Experiment::SpiralLoglaw);
        let b = reproducible(Experiment::Dioph);
        Outcome { pass: a.pass && b.pass, detail: format!("{}; {}", a.detail, b.detail) }
    });
    results.push((12, "reproducibility", o, t));

    let mut all = true;
    for (n, name, o, t) in &results {
        all &= o.pass;
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} [{tag}] {name} ({:.1}s): {}", t.as_secs_f64(), o.detail);
    }
    println!("{} of {} criteria pass", results.iter().filter(|r| r.2.pass).count(), results.len());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
