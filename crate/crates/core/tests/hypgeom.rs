use horolab_core::hypgeom::{
    boundary_from_direction, bounds_suite, dc, dc_closed_form, dc_limit_oracle, dist, limit_from_basepoints, lorentz,
    origin, project, random_boundary, random_totgeod, ray_point, renormalize, GeomError, Lorentz, TotGeod,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Random `(C, ξ, η)` in `H³` with both points kept off `∂C`.
fn instance(rng: &mut ChaCha8Rng) -> (TotGeod, Vec<f64>, Vec<f64>) {
    loop {
        let k = rng.gen_range(1..=2);
        let c = random_totgeod(3, k, rng);
        let (xi, eta) = (random_boundary(3, rng), random_boundary(3, rng));
        let off = |x: &[f64]| {
            let n = c.normal_part(x);
            lorentz(&n, &n).sqrt() / x[0].abs().max(1.0)
        };
        if off(&xi) > 0.05 && off(&eta) > 0.05 && (-lorentz(&xi, &eta)) > 1e-6 {
            return (c, xi, eta);
        }
    }
}

#[test]
fn closed_form_examples() {
    assert_eq!(dc_closed_form(0.0, 0.0), 0.0);
    assert!((dc_closed_form(0.0, PI) - 1.0).abs() < 1e-15);
    for rho in [0.1, 1.0, 3.0, 7.5] {
        assert!((dc_closed_form(rho, 0.0) - (rho / 2.0).sinh()).abs() < 1e-12 * (rho / 2.0).sinh().max(1.0));
        let alt = 0.5 * (rho.exp() + (-rho).exp() - 2.0 * 1.3f64.cos()).sqrt();
        assert!((dc_closed_form(rho, 1.3) - alt).abs() < 1e-12);
    }
}

#[test]
fn perpendicular_point_projects_to_base() {
    let c = TotGeod::standard(3, 1);
    let xi = boundary_from_direction(&[0.0, 1.0, 0.0]);
    let p = project(&c, &xi).unwrap();
    assert!(close(&p.foot, &origin(3), 1e-14));
    assert!(close(&p.normal, &[0.0, 0.0, 1.0, 0.0], 1e-14));
    let on_c = boundary_from_direction(&[1.0, 0.0, 0.0]);
    assert_eq!(project(&c, &on_c), Err(GeomError::AtInfinity));
    assert!(TotGeod::new(vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]]).is_err());
}

#[test]
fn projection_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let c = TotGeod::standard(3, 1);
    for _ in 0..200 {
        // Maps preserving C: boosts along it and rotations about it.
        let g = Lorentz::boost(3, 1, rng.gen_range(-2.0..2.0)).compose(&Lorentz::rotation(3, 2, 3, rng.gen_range(0.0..6.0)));
        let (xi, eta) = (random_boundary(3, &mut rng), random_boundary(3, &mut rng));
        let (Ok(p), Ok(_)) = (project(&c, &xi), project(&c, &eta)) else { continue };
        let gp = project(&c, &g.apply(&xi)).unwrap();
        assert!(close(&gp.foot, &g.apply(&p.foot), 1e-9));
        let a = dc(&c, &xi, &eta).unwrap();
        let b = dc(&c, &g.apply(&xi), &g.apply(&eta)).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.max(1.0));
        // Moving C along with the points.
        let h = Lorentz::random(3, &mut rng);
        let b = dc(&c.map(&h), &h.apply(&xi), &h.apply(&eta)).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.max(1.0));
    }
}

/// Newton descent of the horofunction `−⟨x, ξ⟩` over `C`, in the chart
/// `w ↦ √(1+|w|²) e₀ + Σ wᵢ eᵢ`.
fn descend(basis: &[Vec<f64>], xi: &[f64]) -> Vec<f64> {
    let k = basis.len() - 1;
    let a = lorentz(&basis[0], xi);
    let b: Vec<f64> = basis[1..].iter().map(|e| lorentz(e, xi)).collect();
    let mut w = vec![0.0; k];
    for _ in 0..100 {
        let s = (1.0 + w.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let grad: Vec<f64> = (0..k).map(|i| -a * w[i] / s - b[i]).collect();
        let hess: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| -a * ((if i == j { 1.0 } else { 0.0 }) / s - w[i] * w[j] / s.powi(3))).collect())
            .collect();
        let step = solve(&hess, &grad);
        for i in 0..k {
            w[i] -= step[i];
        }
        if step.iter().all(|x| x.abs() < 1e-15) {
            break;
        }
    }
    let s = (1.0 + w.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let mut x: Vec<f64> = basis[0].iter().map(|v| s * v).collect();
    for (i, e) in basis[1..].iter().enumerate() {
        for (xx, v) in x.iter_mut().zip(e) {
            *xx += w[i] * v;
        }
    }
    x
}

fn solve(m: &[Vec<f64>], r: &[f64]) -> Vec<f64> {
    match m.len() {
        1 => vec![r[0] / m[0][0]],
        2 => {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            vec![(r[0] * m[1][1] - r[1] * m[0][1]) / det, (m[0][0] * r[1] - m[1][0] * r[0]) / det]
        }
        _ => unreachable!(),
    }
}

#[test]
fn foot_matches_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let k = rng.gen_range(1..=2);
        let g = Lorentz::random(3, &mut rng);
        let basis: Vec<Vec<f64>> = (0..=k).map(|i| g.apply(&(0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
        let c = TotGeod::new(basis.clone()).unwrap();
        let xi = random_boundary(3, &mut rng);
        let Ok(p) = project(&c, &xi) else { continue };
        let x = descend(&basis, &xi);
        assert!(dist(&p.foot, &x) <= 1e-8, "{}", dist(&p.foot, &x));
        assert!((lorentz(&p.normal, &p.normal) - 1.0).abs() <= 1e-10);
        for b in &basis {
            assert!(lorentz(&p.normal, b).abs() <= 1e-10 * b.iter().map(|v| v.abs()).sum::<f64>());
        }
    }
}

#[test]
fn limit_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let (c, xi, eta) = instance(&mut rng);
        let closed = dc(&c, &xi, &eta).unwrap();
        let v30 = dc_limit_oracle(&c, &xi, &eta, 30.0).unwrap();
        let v40 = dc_limit_oracle(&c, &xi, &eta, 40.0).unwrap();
        assert!((v30 - closed).abs() <= 1e-6, "{v30} vs {closed}");
        assert!((v30 - v40).abs() <= 1e-8 * closed.max(1.0));
        // Rays from arbitrary base points.
        let x = renormalize(&[2.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.5]);
        let y = origin(3);
        let v = limit_from_basepoints(&c, &x, &xi, &y, &eta, 30.0).unwrap();
        assert!((v - closed).abs() <= 1e-6 * closed.max(1.0), "{v} vs {closed}");
        assert!((closed - dc(&c, &eta, &xi).unwrap()).abs() <= 1e-12 * closed.max(1.0));
    }
}

#[test]
fn bounds_and_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let (mut lo, mut hi) = (f64::MAX, 0f64);
    for _ in 0..10_000 {
        let (c, xi, eta) = instance(&mut rng);
        let r = bounds_suite(&c, &xi, &eta, &[0.1, 1.0, 2.0]).unwrap();
        assert!(r.holds(), "{r:?}");
        lo = lo.min(r.visual_ratio);
        hi = hi.max(r.visual_ratio);
    }
    assert!(lo > 0.0 && hi.is_finite());
}

#[test]
fn triangle_inequality_fails() {
    let c = TotGeod::standard(2, 1);
    let at = |s: f64| {
        let p = [s.cosh(), s.sinh(), 0.0];
        // Kept unnormalized: scaling to ξ₀ = 1 would round it onto ∂C.
        p.iter().zip([0.0, 0.0, 1.0]).map(|(a, b)| a + b).collect::<Vec<f64>>()
    };
    let (a, b, cc) = (at(-10.0), at(0.0), at(10.0));
    let ab = dc(&c, &a, &b).unwrap();
    let bc = dc(&c, &b, &cc).unwrap();
    let ac = dc(&c, &a, &cc).unwrap();
    assert!((ab - 5f64.sinh()).abs() < 1e-8 * ab);
    assert!(ac > ab + bc, "{ac} <= {ab} + {bc}");
}

#[test]
fn rays_stay_on_hyperboloid() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..100 {
        let p = renormalize(&[3.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let xi = random_boundary(3, &mut rng);
        let v = horolab_core::hypgeom::direction(&p, &xi);
        for t in [1.0, 5.0, 10.0, 20.0] {
            let x = ray_point(&p, &v, t);
            // Norm defect relative to the size of the coordinates.
            let size: f64 = x.iter().map(|c| c * c).sum();
            assert!((lorentz(&x, &x) + 1.0).abs() / size <= 1e-9 * t);
            assert!((dist(&p, &x) - t).abs() <= 1e-9 * t, "{t} {}", dist(&p, &x));
        }
    }
}
