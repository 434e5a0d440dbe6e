//! Validation suites for the distance-like map and its geometric bounds.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use horolab_core::exactnum::Poly;
use horolab_core::flow::{perron, QuotientGraph};
use horolab_core::hypgeom::{
    bounds_suite, dc, dc_closed_form, dc_limit_oracle, lorentz, Lorentz, random_boundary, random_totgeod, TotGeod,
};
use horolab_core::quadratic::{act, Mobius, QuadIrr};
use horolab_core::treespace::bt::{self, Ball, BtEnd};
use horolab_core::treespace::cayley::{self, CayleyEnd};
use horolab_core::treespace::sample::{
    random_bt_end, random_bt_instance, random_cayley_end, random_cayley_instance, random_subtree,
};
use horolab_core::treespace::{
    closest_point, d_c, line_distance, line_gap, thicken, ConvexSub, DcVal, Ray, DEFAULT_DEPTH,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{num, Provenance, Report, Table};
use crate::spiral::PERRON_TOL;
use crate::LabError;

const CAP: usize = DEFAULT_DEPTH;

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub name: &'static str,
    pub samples: u64,
    pub failures: u64,
    pub max_error: f64,
    pub tolerance: f64,
    pub label: Provenance,
    pub detail: String,
}

impl Suite {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// `e ≤ tol`, false for NaN.
fn within(e: f64, tol: f64) -> bool {
    e <= tol
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// The limit value if it is the same for five consecutive `t`.
fn stable(f: impl Fn(u64) -> Option<i64>, t0: u64) -> Option<i64> {
    let v = f(t0)?;
    (t0 + 1..t0 + 5).all(|t| f(t) == Some(v)).then_some(v)
}

/// The case formula against the truncated limit, on both tree backends.
pub fn dc_formula_trees(n: u64, seed: u64) -> Suite {
    let fails: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let ok = if i % 2 == 0 {
                let q = [3, 5][(i / 2 % 2) as usize];
                let inst = random_bt_instance(q, &mut rng);
                let formula = d_c(&inst.coded, &inst.xi, &inst.eta, CAP).ok().and_then(DcVal::exp2);
                let lim = stable(|t| bt::native_dc_limit(&inst.native, &inst.xi, &inst.eta, q, t, 40), 80);
                formula.is_some() && formula == lim
            } else {
                let k = [2, 3][(i / 2 % 2) as usize];
                let inst = random_cayley_instance(k, &mut rng);
                let formula = d_c(&inst.coded, &inst.xi, &inst.eta, CAP).ok().and_then(DcVal::exp2);
                let lim = stable(|t| cayley::native_dc_limit(&inst.native, &inst.xi, &inst.eta, t as usize, 30), 60);
                formula.is_some() && formula == lim
            };
            u64::from(!ok)
        })
        .sum();
    Suite {
        name: "dc-formula-trees",
        samples: n,
        failures: fails,
        max_error: 0.0,
        tolerance: 0.0,
        label: Provenance::Derived,
        detail: "integer exponents, Bruhat–Tits q ∈ {3,5} and free groups of rank 2 and 3".into(),
    }
}

/// A random `(C, ξ, η)` in `Hⁿ` with both points kept off `∂C`.
pub fn hyperbolic_instance(n: usize, rng: &mut ChaCha8Rng) -> (TotGeod, Vec<f64>, Vec<f64>) {
    loop {
        let k = rng.gen_range(1..n);
        let c = random_totgeod(n, k, rng);
        let (xi, eta) = (random_boundary(n, rng), random_boundary(n, rng));
        let off = |x: &[f64]| {
            let p = c.normal_part(x);
            lorentz(&p, &p).sqrt() / x[0].abs().max(1.0)
        };
        if off(&xi) > 0.05 && off(&eta) > 0.05 && -lorentz(&xi, &eta) > 1e-6 {
            return (c, xi, eta);
        }
    }
}

/// Closed form against the limit oracle at `t = 30` in `H³`.
pub fn hyperbolic_closed_form(n: u64, seed: u64) -> Suite {
    let errs: Vec<f64> = (0..n)
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let (c, xi, eta) = hyperbolic_instance(3, &mut rng);
            match (dc(&c, &xi, &eta), dc_limit_oracle(&c, &xi, &eta, 30.0)) {
                (Ok(a), Ok(b)) => (a - b).abs(),
                _ => f64::INFINITY,
            }
        })
        .collect();
    let tol = 1e-6;
    Suite {
        name: "hyperbolic-closed-form",
        samples: n,
        failures: errs.iter().filter(|e| !within(**e, tol)).count() as u64,
        max_error: errs.iter().copied().fold(0.0, f64::max),
        tolerance: tol,
        label: Provenance::Paper,
        detail: "|closed form − limit at t = 30| in H³, k ∈ {1, 2}".into(),
    }
}

/// `θ = 0` gives `sinh(ρ/2)`; `ρ = 0, θ = π` gives 1.
pub fn closed_form_special_values() -> Suite {
    let mut errs: Vec<f64> = [0.1, 0.5, 1.0, 3.0, 7.5, 12.0]
        .iter()
        .map(|&r: &f64| (dc_closed_form(r, 0.0) - (r / 2.0).sinh()).abs() / (r / 2.0).sinh().max(1.0))
        .collect();
    errs.push((dc_closed_form(0.0, PI) - 1.0).abs());
    // The same values from configurations around a geodesic in H²: one
    // boundary point and its image under a boost along C, then two points
    // on opposite sides with the same foot.
    let c = TotGeod::standard(2, 1);
    let up = [1.0, 0.0, 1.0];
    for r in [0.5f64, 2.0, 5.0] {
        let moved = Lorentz::boost(2, 1, r).apply(&up);
        let v = dc(&c, &up, &moved).unwrap_or(f64::NAN);
        errs.push((v - (r / 2.0).sinh()).abs() / (r / 2.0).sinh().max(1.0));
    }
    errs.push((dc(&c, &up, &[1.0, 0.0, -1.0]).unwrap_or(f64::NAN) - 1.0).abs());
    let tol = 1e-12;
    Suite {
        name: "closed-form-special-values",
        samples: errs.len() as u64,
        failures: errs.iter().filter(|e| !within(**e, tol)).count() as u64,
        max_error: errs.iter().copied().fold(0.0, f64::max),
        tolerance: tol,
        label: Provenance::Paper,
        detail: "sinh(ρ/2) at θ = 0 and 1 at ρ = 0, θ = π".into(),
    }
}

/// The two-sided bound `(3−2√2) e^{½d(πξ,πη) − d(C,]ξ,η[)} ≤ d_C ≤ e^{½d(πξ,πη)}`
/// on the integer exponent of `d_C = e^{k/2}`.
fn tree_bounds_hold<R: Ray>(c: &ConvexSub<R>, xi: &R, eta: &R) -> bool {
    let slack = (2.0 * (3.0 - 2.0 * 2f64.sqrt()).ln()).ceil() as i64;
    let (Ok(DcVal::Exp2(k)), Ok(p), Ok(pp), Ok(dl)) =
        (d_c(c, xi, eta, CAP), closest_point(c, xi, CAP), closest_point(c, eta, CAP), line_gap(c, xi, eta, CAP))
    else {
        return false;
    };
    let dist = p.dist(&pp) as i64;
    k <= dist && k >= dist - 2 * dl as i64 + slack
}

pub fn tree_bounds(n: u64, seed: u64) -> Suite {
    let fails: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let ok = if i % 2 == 0 {
                let inst = random_bt_instance([3, 5][(i / 2 % 2) as usize], &mut rng);
                tree_bounds_hold(&inst.coded, &inst.xi, &inst.eta)
            } else {
                let inst = random_cayley_instance([2, 3][(i / 2 % 2) as usize], &mut rng);
                tree_bounds_hold(&inst.coded, &inst.xi, &inst.eta)
            };
            u64::from(!ok)
        })
        .sum();
    Suite {
        name: "bounds-trees",
        samples: n,
        failures: fails,
        max_error: 0.0,
        tolerance: 0.0,
        label: Provenance::Paper,
        detail: "exact on integer exponents, constant 3 − 2√2".into(),
    }
}

/// `d_{N_m C} = e^m d_C` for subtrees thickened by `m = 1, 2, 3`.
pub fn tree_scaling(n: u64, seed: u64) -> Suite {
    fn one<R: Ray>(vs: Vec<horolab_core::treespace::Vertex>, q: u32, xi: &R, eta: &R) -> Option<bool> {
        let base = d_c(&ConvexSub::<R>::Subtree(vs.clone()), xi, eta, CAP).ok()?;
        Some((1..4).all(|m| {
            ConvexSub::<R>::subtree(thicken(&vs, m, q))
                .ok()
                .and_then(|c| d_c(&c, xi, eta, CAP).ok())
                .is_some_and(|v| v == base.scale(m as i64))
        }))
    }
    let out: Vec<Option<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let size = rng.gen_range(1..5);
            if i % 2 == 0 {
                let q = 3;
                let vs = random_subtree(q, size, &mut rng);
                let (xi, eta) = (random_bt_end(q, &mut rng), random_bt_end(q, &mut rng));
                one::<BtEnd>(vs, q, &xi, &eta)
            } else {
                let k = 2;
                let q = cayley::branching(k);
                let vs = random_subtree(q, size, &mut rng);
                let (xi, eta): (CayleyEnd, CayleyEnd) = (random_cayley_end(k, &mut rng), random_cayley_end(k, &mut rng));
                one::<CayleyEnd>(vs, q, &xi, &eta)
            }
        })
        .collect();
    let used = out.iter().filter(|o| o.is_some()).count() as u64;
    Suite {
        name: "scaling-trees",
        samples: used,
        failures: out.iter().filter(|o| **o == Some(false)).count() as u64,
        max_error: 0.0,
        tolerance: 0.0,
        label: Provenance::Paper,
        detail: format!("{} draws with a projection at infinity skipped", n - used),
    }
}

/// Bounds and `e^ε` scaling in `H²` and `H³`.
pub fn hyperbolic_bounds(n: u64, seed: u64) -> Suite {
    let errs: Vec<(bool, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let (c, xi, eta) = hyperbolic_instance(2 + (i % 2) as usize, &mut rng);
            match bounds_suite(&c, &xi, &eta, &[0.1, 1.0, 2.0]) {
                Ok(r) => (r.holds(), r.scaling_err),
                Err(_) => (false, f64::INFINITY),
            }
        })
        .collect();
    Suite {
        name: "bounds-hyperbolic",
        samples: n,
        failures: errs.iter().filter(|e| !e.0).count() as u64,
        max_error: errs.iter().map(|e| e.1).fold(0.0, f64::max),
        tolerance: 1e-8,
        label: Provenance::Paper,
        detail: "bounds to relative 1e-9, scaling error ≤ 1e-8, ε ∈ {0.1, 1, 2}".into(),
    }
}

/// Three points along a geodesic `C` in `H²`, all at the same height above
/// it: the far pair is further apart than the two short hops combined.
pub fn triangle_witness() -> Suite {
    let c = TotGeod::standard(2, 1);
    // Kept unnormalized: scaling to ξ₀ = 1 would round it onto ∂C.
    let at = |s: f64| vec![s.cosh(), s.sinh(), 1.0];
    let (a, b, cc) = (at(-10.0), at(0.0), at(10.0));
    let v = |x: &[f64], y: &[f64]| dc(&c, x, y).unwrap_or(f64::NAN);
    let (ab, bc, ac) = (v(&a, &b), v(&b, &cc), v(&a, &cc));
    Suite {
        name: "triangle-witness",
        samples: 1,
        failures: u64::from(!within(ab + bc, ac)),
        max_error: 0.0,
        tolerance: 0.0,
        label: Provenance::Derived,
        detail: format!("d(a,c) = {ac:.6e} > d(a,b) + d(b,c) = {:.6e}", ab + bc),
    }
}

/// Offsets `ν − D` between the height exponent of `γα` and the depth of the
/// translated axis, over γ with images in the ball `ν ≥ 1`.
pub fn height_depth(q: u32) -> (Vec<i64>, usize) {
    let alpha = QuadIrr::default_base(q);
    let c0 = (BtEnd::quadratic(alpha.clone()), BtEnd::quadratic(alpha.conjugate()));
    let s = Mobius::s(q);
    let window = Ball::new(q, 1, 0, vec![]);
    let bs: Vec<Poly> = Poly::enumerate(q, 2).filter(|b| b.degree().unwrap_or(0) >= 1).collect();
    let mut offsets = Vec::new();
    for (i, b1) in bs.iter().enumerate() {
        for b2 in bs.iter().skip(i % 5).step_by(5).chain(std::iter::once(&Poly::zero(q))) {
            let mut g = s.compose(&Mobius::translation(b1.clone()));
            if !b2.is_zero() {
                g = s.compose(&Mobius::translation(b2.clone())).compose(&g);
            }
            let beta = act(&g, &alpha);
            let (x, y) = (BtEnd::quadratic(beta.clone()), BtEnd::quadratic(beta.conjugate()));
            if !(window.contains(&x) && window.contains(&y)) {
                continue;
            }
            let Ok(d) = line_distance((&c0.0, &c0.1), (&x, &y), CAP) else { continue };
            offsets.push(beta.height_log_q() - d as i64);
        }
    }
    let n = offsets.len();
    (offsets, n)
}

/// `e^{−D}` against `|γα − γα*|^{1/log q} = e^{−ν}`: the quotient is
/// `e^{ν − D}`, so its spread is `e^{max − min}` of the offsets.
pub fn height_depth_suite(q: u32) -> Suite {
    let (offsets, n) = height_depth(q);
    let set: BTreeSet<i64> = offsets.iter().copied().collect();
    let spread = match (set.first(), set.last()) {
        (Some(a), Some(b)) => ((b - a) as f64).exp(),
        _ => f64::INFINITY,
    };
    let c_star = set.first().map(|a| (*a as f64).exp());
    Suite {
        name: "height-depth",
        samples: n as u64,
        failures: u64::from(n < 50) + u64::from(!within(spread, 1.01)),
        max_error: spread - 1.0,
        tolerance: 0.01,
        label: Provenance::Paper,
        detail: format!("max/min quotient {spread}, c_* = {}", c_star.map(num).unwrap_or_default()),
    }
}

/// Perron value of the non-backtracking operator on regular graphs.
pub fn entropy() -> Suite {
    let mut errs = Vec::new();
    let mut detail = Vec::new();
    for (name, g) in [("K4", QuotientGraph::complete(4)), ("petersen", QuotientGraph::petersen())] {
        let want = g.degree(0) as f64 - 1.0;
        match perron(&g, PERRON_TOL) {
            Ok(ch) => {
                errs.push((ch.lambda - want).abs().max((ch.entropy - ch.lambda.ln()).abs()));
                detail.push(format!("{name}: λ = {}, h = {}", ch.lambda, ch.entropy));
            }
            Err(e) => {
                errs.push(f64::INFINITY);
                detail.push(format!("{name}: {e}"));
            }
        }
    }
    let tol = 1e-10;
    Suite {
        name: "entropy",
        samples: 2,
        failures: errs.iter().filter(|e| !within(**e, tol)).count() as u64,
        max_error: errs.iter().copied().fold(0.0, f64::max),
        tolerance: tol,
        label: Provenance::Paper,
        detail: detail.join("; "),
    }
}

pub fn all_suites(cfg: &RunConfig) -> Vec<Suite> {
    let (n, seed) = (cfg.model.samples, cfg.seed);
    // Each random suite draws from its own seed.
    let s = |k: u64| seed.wrapping_add(k);
    vec![
        dc_formula_trees(n, s(0)),
        hyperbolic_closed_form(100.min(n), s(1)),
        closed_form_special_values(),
        tree_bounds(n, s(2)),
        tree_scaling(n, s(3)),
        hyperbolic_bounds(n, s(4)),
        triangle_witness(),
        height_depth_suite(cfg.model.q),
        entropy(),
    ]
}

/// CSV: `suite,samples,failures,max_error,tolerance,label`.
pub fn geom_validate(cfg: &RunConfig) -> Result<Report, LabError> {
    let suites = all_suites(cfg);
    let mut tab = Table::new(&["suite", "samples", "failures", "max_error", "tolerance", "label"]);
    for s in &suites {
        tab.push(vec![
            s.name.into(),
            s.samples.to_string(),
            s.failures.to_string(),
            num(s.max_error),
            num(s.tolerance),
            s.label.as_str().into(),
        ]);
    }
    let mut rep = Report::new(cfg, tab);
    rep.target("lower_bound_constant", 3.0 - 2.0 * 2f64.sqrt(), Provenance::Paper);
    for s in &suites {
        rep.check(s.name, s.passed(), format!("{} of {} failed; {}", s.failures, s.samples, s.detail));
    }
    Ok(rep)
}
