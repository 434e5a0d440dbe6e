//! Real hyperbolic space `Hⁿ` in the hyperboloid model, with projections to
//! totally geodesic subspaces and the distance-like map `d_C`.
//!
//! Points satisfy `⟨x, x⟩ = −1`, `x₀ > 0` for `⟨x, y⟩ = −x₀y₀ + Σ xᵢyᵢ`.
//! Boundary points are future null vectors, up to positive scaling.

use alloc::vec::Vec;

use libm::{acosh, asinh, cos, cosh, exp, fabs, sin, sinh, sqrt};
use rand::Rng;

pub const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("boundary point lies on the boundary of the subspace")]
    AtInfinity,
    #[error("Gram matrix off by {0:e}")]
    NotOrthonormal(f64),
    #[error("dimension {0} unsupported")]
    Dimension(usize),
}

pub fn lorentz(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

fn axpy(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

fn scale(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|u| a * u).collect()
}

/// Rescales a timelike vector back onto the upper sheet.
pub fn renormalize(x: &[f64]) -> Vec<f64> {
    let n = sqrt(-lorentz(x, x));
    scale(if x[0] < 0.0 { -1.0 / n } else { 1.0 / n }, x)
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    let c = -lorentz(x, y);
    if c < 2.0 {
        // ⟨x−y, x−y⟩ = 4 sinh²(d/2) keeps short distances accurate.
        let d = axpy(1.0, x, -1.0, y);
        2.0 * asinh(sqrt(lorentz(&d, &d).max(0.0)) / 2.0)
    } else {
        acosh(c)
    }
}

/// `cosh t · p + sinh t · v` for a unit tangent `v` at `p`.
pub fn ray_point(p: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    axpy(cosh(t), p, sinh(t), v)
}

/// The unit tangent at `p` pointing to the boundary point `ξ`.
pub fn direction(p: &[f64], xi: &[f64]) -> Vec<f64> {
    let s = lorentz(xi, p);
    let w = axpy(1.0, xi, s, p);
    scale(-1.0 / s, &w)
}

/// The base point `(1, 0, …, 0)` of `Hⁿ`.
pub fn origin(n: usize) -> Vec<f64> {
    let mut o = alloc::vec![0.0; n + 1];
    o[0] = 1.0;
    o
}

/// Boundary point in the unit spatial direction `u`.
pub fn boundary_from_direction(u: &[f64]) -> Vec<f64> {
    let n = sqrt(u.iter().map(|x| x * x).sum::<f64>());
    let mut xi = alloc::vec![1.0];
    xi.extend(u.iter().map(|x| x / n));
    xi
}

/// Rescales a null vector to `ξ₀ = 1`.
pub fn normalize_null(xi: &[f64]) -> Vec<f64> {
    scale(1.0 / xi[0], xi)
}

/// A matrix preserving the Lorentz form, acting on column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Lorentz(pub Vec<Vec<f64>>);

impl Lorentz {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn compose(&self, o: &Lorentz) -> Lorentz {
        let n = self.0.len();
        Lorentz(
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| self.0[i][k] * o.0[k][j]).sum()).collect()).collect(),
        )
    }

    /// Boost of rapidity `r` mixing the time axis with spatial axis `axis`.
    pub fn boost(n: usize, axis: usize, r: f64) -> Lorentz {
        let mut m = identity(n + 1);
        m[0][0] = cosh(r);
        m[axis][axis] = cosh(r);
        m[0][axis] = sinh(r);
        m[axis][0] = sinh(r);
        Lorentz(m)
    }

    /// Rotation by `a` in the spatial plane `(i, j)`.
    pub fn rotation(n: usize, i: usize, j: usize, a: f64) -> Lorentz {
        let mut m = identity(n + 1);
        m[i][i] = cos(a);
        m[j][j] = cos(a);
        m[i][j] = -sin(a);
        m[j][i] = sin(a);
        Lorentz(m)
    }

    /// A product of random boosts and rotations.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Lorentz {
        let mut g = Lorentz(identity(n + 1));
        for _ in 0..3 {
            for i in 1..=n {
                for j in i + 1..=n {
                    g = g.compose(&Lorentz::rotation(n, i, j, rng.gen_range(0.0..core::f64::consts::TAU)));
                }
            }
            g = g.compose(&Lorentz::boost(n, rng.gen_range(1..=n), rng.gen_range(-1.0..1.0)));
        }
        g
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// A totally geodesic `Hᵏ ⊂ Hⁿ`: the trace of a timelike `(k+1)`-plane,
/// given by a Lorentz-orthonormal basis whose first vector is a point of `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotGeod {
    basis: Vec<Vec<f64>>,
}

impl TotGeod {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self, GeomError> {
        let dim = basis.first().map_or(0, |b| b.len());
        if !(3..=5).contains(&dim) || basis.len() < 2 || basis.len() >= dim {
            return Err(GeomError::Dimension(dim));
        }
        let mut worst: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i != j {
                    0.0
                } else if i == 0 {
                    -1.0
                } else {
                    1.0
                };
                worst = worst.max(fabs(lorentz(a, b) - want));
            }
        }
        if worst > TOL {
            return Err(GeomError::NotOrthonormal(worst));
        }
        Ok(TotGeod { basis })
    }

    /// The coordinate `Hᵏ` through the origin of `Hⁿ`.
    pub fn standard(n: usize, k: usize) -> Self {
        TotGeod::new((0..=k).map(|i| (0..=n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
            .expect("coordinate basis")
    }

    pub fn map(&self, g: &Lorentz) -> Self {
        TotGeod { basis: self.basis.iter().map(|b| g.apply(b)).collect() }
    }

    pub fn base_point(&self) -> &[f64] {
        &self.basis[0]
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].len() - 1
    }

    /// Orthogonal projection onto the spanning plane.
    fn plane_part(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; x.len()];
        for (i, b) in self.basis.iter().enumerate() {
            let c = if i == 0 { -lorentz(x, b) } else { lorentz(x, b) };
            for (o, v) in out.iter_mut().zip(b) {
                *o += c * v;
            }
        }
        out
    }

    /// Component orthogonal to the plane (spacelike).
    pub fn normal_part(&self, x: &[f64]) -> Vec<f64> {
        axpy(1.0, x, -1.0, &self.plane_part(x))
    }

    /// `sinh d(x, C) = ‖x⊥‖`.
    pub fn dist_to_point(&self, x: &[f64]) -> f64 {
        let n = self.normal_part(x);
        asinh(sqrt(lorentz(&n, &n).max(0.0)))
    }
}

/// `π_C(ξ)` and the unit normal `π′_C(ξ)`, carried to the base point of `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjData {
    pub foot: Vec<f64>,
    pub normal: Vec<f64>,
}

/// The foot is where `−⟨x, ξ⟩` (the horofunction) is least on `C`: the
/// normalized plane part of `ξ`. The normal part of `ξ` is the outward
/// direction at the foot; parallel transport along `C` fixes the normal
/// bundle, so it serves at the base point too.
pub fn project(c: &TotGeod, xi: &[f64]) -> Result<ProjData, GeomError> {
    let nperp = c.normal_part(xi);
    let len = sqrt(lorentz(&nperp, &nperp).max(0.0));
    if len <= 1e-9 * fabs(xi[0]) {
        return Err(GeomError::AtInfinity);
    }
    let foot = renormalize(&c.plane_part(xi));
    Ok(ProjData { foot, normal: scale(1.0 / len, &nperp) })
}

/// `½√(e^ρ + e^{−ρ} − 2 cos θ) = √(sinh²(ρ/2) + sin²(θ/2))`.
pub fn dc_closed_form(rho: f64, theta: f64) -> f64 {
    let s = sinh(rho / 2.0);
    let t = sin(theta / 2.0);
    sqrt(s * s + t * t)
}

/// `(ρ, θ)`: distance between the feet and angle between the normals.
pub fn rho_theta(c: &TotGeod, xi: &[f64], eta: &[f64]) -> Result<(f64, f64), GeomError> {
    let a = project(c, xi)?;
    let b = project(c, eta)?;
    let ct = lorentz(&a.normal, &b.normal).clamp(-1.0, 1.0);
    Ok((dist(&a.foot, &b.foot), libm::acos(ct)))
}

pub fn dc(c: &TotGeod, xi: &[f64], eta: &[f64]) -> Result<f64, GeomError> {
    let (rho, theta) = rho_theta(c, xi, eta)?;
    Ok(dc_closed_form(rho, theta))
}

/// `e^{½ d(ξ_t, η_t) − t}` for the rays from the feet.
pub fn dc_limit_oracle(c: &TotGeod, xi: &[f64], eta: &[f64], t: f64) -> Result<f64, GeomError> {
    let a = project(c, xi)?;
    let b = project(c, eta)?;
    Ok(limit_from_feet(&a.foot, xi, &b.foot, eta, t))
}

/// The defining limit with rays starting at arbitrary feet `p` and `p′`.
pub fn limit_from_feet(p: &[f64], xi: &[f64], pp: &[f64], eta: &[f64], t: f64) -> f64 {
    let x = ray_point(p, &direction(p, xi), t);
    let y = ray_point(pp, &direction(pp, eta), t);
    exp(dist(&x, &y) / 2.0 - t)
}

/// The same limit with rays from arbitrary base points `x, y`, corrected by
/// the distances of the ray points to the feet.
pub fn limit_from_basepoints(c: &TotGeod, x: &[f64], xi: &[f64], y: &[f64], eta: &[f64], t: f64) -> Result<f64, GeomError> {
    let a = project(c, xi)?;
    let b = project(c, eta)?;
    let xt = ray_point(x, &direction(x, xi), t);
    let yt = ray_point(y, &direction(y, eta), t);
    Ok(exp((dist(&xt, &yt) - dist(&xt, &a.foot) - dist(&yt, &b.foot)) / 2.0))
}

/// `d_{N_ε C}` by the limit: the closest point of the ε-neighbourhood to `ξ`
/// lies at distance ε from `π_C(ξ)` on the normal toward `ξ`.
pub fn dc_neighborhood_limit(c: &TotGeod, eps: f64, xi: &[f64], eta: &[f64], t: f64) -> Result<f64, GeomError> {
    let a = project(c, xi)?;
    let b = project(c, eta)?;
    let pa = ray_point(&a.foot, &direction(&a.foot, xi), eps);
    let pb = ray_point(&b.foot, &direction(&b.foot, eta), eps);
    Ok(limit_from_feet(&pa, xi, &pb, eta, t))
}

/// Distance from `C` to the geodesic line `]ξ, η[`.
///
/// On the line `x(s) ∝ e^s ξ + e^{−s} η` the normal part has squared norm
/// `(e^{2s}a + 2b + e^{−2s}c)/(−2⟨ξ,η⟩)`, least at `2(√(ac) + b)`.
pub fn dist_to_line(c: &TotGeod, xi: &[f64], eta: &[f64]) -> f64 {
    let (u, v) = (c.normal_part(xi), c.normal_part(eta));
    let (a, b, cc) = (lorentz(&u, &u), lorentz(&u, &v), lorentz(&v, &v));
    let s2 = ((sqrt(a * cc) + b) / -lorentz(xi, eta)).max(0.0);
    asinh(sqrt(s2))
}

/// Visual distance `e^{−(ξ|η)_o}` from the origin.
pub fn visual_dist(xi: &[f64], eta: &[f64]) -> f64 {
    sqrt((-lorentz(&normalize_null(xi), &normalize_null(eta)) / 2.0).max(0.0))
}

/// A uniformly random boundary point.
pub fn random_boundary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = u.iter().map(|x| x * x).sum();
        if r2 > 1e-4 && r2 <= 1.0 {
            return boundary_from_direction(&u);
        }
    }
}

/// A totally geodesic `Hᵏ` in general position.
pub fn random_totgeod<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> TotGeod {
    TotGeod::standard(n, k).map(&Lorentz::random(n, rng))
}

/// Outcome of the inequality checks for one `(C, ξ, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub dc: f64,
    /// `(3 − 2√2) e^{½ d(πξ, πη)} e^{−d(C, ]ξ,η[)}`.
    pub lower: f64,
    /// `e^{½ d(πξ, πη)}`.
    pub upper: f64,
    /// `d_C / d_{x₀}` for the visual distance from the base point of `C`.
    pub visual_ratio: f64,
    /// Worst relative error of `d_{N_ε C} = e^ε d_C` over the ε tested.
    pub scaling_err: f64,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.lower <= self.dc * (1.0 + 1e-9) && self.dc <= self.upper * (1.0 + 1e-9) && self.scaling_err <= 1e-8
    }
}

pub fn bounds_suite(c: &TotGeod, xi: &[f64], eta: &[f64], eps: &[f64]) -> Result<BoundsReport, GeomError> {
    let (rho, theta) = rho_theta(c, xi, eta)?;
    let val = dc_closed_form(rho, theta);
    let lower = (3.0 - 2.0 * sqrt(2.0)) * exp(rho / 2.0 - dist_to_line(c, xi, eta));
    let mut scaling_err: f64 = 0.0;
    for &e in eps {
        let lim = dc_neighborhood_limit(c, e, xi, eta, 30.0)?;
        scaling_err = scaling_err.max(fabs(lim / (exp(e) * val) - 1.0));
    }
    // Visual distance seen from the base point of C.
    let o = c.base_point();
    let vis = {
        let s = lorentz(xi, o) * lorentz(eta, o);
        sqrt((lorentz(xi, eta) / (2.0 * s)).abs())
    };
    Ok(BoundsReport { dc: val, lower, upper: exp(rho / 2.0), visual_ratio: val / vis, scaling_err })
}
