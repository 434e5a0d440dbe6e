//! Borel–Cantelli verdicts for reference and user-supplied instances.

use std::fs;

use horolab_core::bcengine::{check_hypotheses, fixtures, point_instance, verdict, BcError, BcInstance, BcItem, Truth, Verdict};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{num, Provenance, Report, Table};
use crate::LabError;

fn bc_err(e: BcError) -> LabError {
    match e {
        BcError::Budget(b) => LabError::Budget(format!("cylinder union grew past {b}")),
        e => LabError::Invalid(e.to_string()),
    }
}

/// Instances that break one hypothesis on purpose, with the condition number
/// that must be reported.
pub fn violation_fixtures() -> Vec<(BcInstance, u8)> {
    let mut dup = point_instance("viol-duplicate", 2, &[1, 2, 3], &|_| 1.0);
    let copy = dup.items.iter().find(|i| i.level == 1).expect("level 1").clone();
    dup.items.push(BcItem { label: "copy".into(), ..copy });

    let mut wide = point_instance("viol-width", 2, &[1, 2, 3, 4, 5, 6], &|_| 1.0);
    wide.rates.m3[2] = wide.rates.m2[2] - 1;

    let mut gap = point_instance("viol-gap", 2, &[1, 2, 3, 4, 5, 6], &|_| 1.0);
    gap.items.retain(|i| i.level != 3);
    vec![(dup, 6), (wide, 1), (gap, 4)]
}

/// CSV: `name,expected,verdict,condition,c,series,series_ratio,tail_first,tail_last,lower_bound,label`.
pub fn bc_run(cfg: &RunConfig) -> Result<Report, LabError> {
    let budget = cfg.model.budget;
    let mut cases: Vec<(BcInstance, String)> = Vec::new();
    let user = cfg.model.instance.is_some();
    if let Some(path) = &cfg.model.instance {
        let text = fs::read_to_string(path).map_err(|e| LabError::Invalid(format!("instance {path}: {e}")))?;
        let inst: BcInstance =
            serde_json::from_str(&text).map_err(|e| LabError::Invalid(format!("instance {path}: {e}")))?;
        cases.push((inst, String::new()));
    } else {
        for f in fixtures() {
            let want = match f.truth {
                Truth::Null => "measure-zero",
                Truth::Positive => "positive-measure",
            };
            cases.push((f.instance, want.into()));
        }
        for (inst, c) in violation_fixtures() {
            cases.push((inst, format!("condition-{c}")));
        }
    }
    let mut tab = Table::new(&[
        "name", "expected", "verdict", "condition", "c", "series", "series_ratio", "tail_first", "tail_last",
        "lower_bound", "label",
    ]);
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for (inst, expected) in &cases {
        let v = verdict(inst, budget).map_err(bc_err)?;
        let cond = match &v.verdict {
            Verdict::HypothesesViolated { condition, .. } => condition.to_string(),
            _ => String::new(),
        };
        let tails = &v.truncation.tails;
        tab.push(vec![
            v.name.clone(),
            expected.clone(),
            v.verdict.kind().into(),
            cond,
            num(v.hypotheses.c),
            format!("{:?}", v.series).to_lowercase(),
            num(v.series_ratio),
            tails.first().cloned().unwrap_or_default(),
            tails.last().cloned().unwrap_or_default(),
            num(v.lower_bound),
            if expected.is_empty() { Provenance::Derived } else { Provenance::Paper }.as_str().into(),
        ]);
        let monotone = v.truncation.exact_tails.windows(2).all(|w| w[0] >= w[1]);
        checks.push((format!("tails-monotone[{}]", v.name), monotone, "tail masses shrink as n₀ grows".to_string()));
        if let Some(c) = expected.strip_prefix("condition-") {
            let c: u8 = c.parse().expect("fixture label");
            let hyp = check_hypotheses(inst).map_err(bc_err)?;
            let detail = hyp.conditions[c as usize - 1].detail.clone();
            checks.push((format!("reports-condition[{}]", v.name), !hyp.holds(c), detail));
        } else if !expected.is_empty() {
            let ok = v.verdict.kind() == expected;
            let mut detail = format!("verdict {} vs ground truth {expected}", v.verdict.kind());
            if expected == "positive-measure" {
                let all = v.hypotheses.first_failure().is_none();
                detail.push_str(&format!(", all hypotheses hold: {all}"));
                checks.push((format!("verdict[{}]", v.name), ok && all, detail));
            } else {
                checks.push((format!("verdict[{}]", v.name), ok, detail));
            }
        }
        reports.push(v);
    }
    let mut rep = Report::new(cfg, tab);
    rep.stat("reports", json!(reports));
    for (name, pass, detail) in checks {
        rep.check(&name, pass, detail);
    }
    if user && matches!(reports[0].verdict, Verdict::Inconclusive { .. }) {
        rep.check("verdict-reached", false, format!("{:?}", reports[0].verdict));
    }
    Ok(rep)
}
