//! SL₂(𝔽_q[X]) and its homography action on quadratic irrationals.

use core::fmt;

use serde::{Deserialize, Serialize};

use super::{normalize, QuadError, QuadIrr};
use crate::exactnum::{canonical_sqrt, finv, Laurent, Poly};

/// `[[a, b], [c, d]]` with `ad − bc = 1`, acting by `x ↦ (ax + b)/(cx + d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mobius {
    a: Poly,
    b: Poly,
    c: Poly,
    d: Poly,
}

impl Mobius {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> Result<Mobius, QuadError> {
        let det = &(&a * &d) - &(&b * &c);
        if !det.is_one() {
            return Err(QuadError::BadDeterminant);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity(q: u32) -> Mobius {
        Mobius { a: Poly::one(q), b: Poly::zero(q), c: Poly::zero(q), d: Poly::one(q) }
    }

    /// `x ↦ x + b`.
    pub fn translation(b: Poly) -> Mobius {
        let q = b.modulus();
        Mobius { a: Poly::one(q), b, c: Poly::zero(q), d: Poly::one(q) }
    }

    /// `x ↦ −1/x`.
    pub fn s(q: u32) -> Mobius {
        Mobius { a: Poly::zero(q), b: Poly::one(q), c: Poly::constant(q, q - 1), d: Poly::zero(q) }
    }

    /// `diag(t, t⁻¹)`, i.e. `x ↦ t² x`.
    pub fn diag(q: u32, t: u32) -> Mobius {
        assert!(!t.is_multiple_of(q), "diagonal entry must be a unit");
        Mobius { a: Poly::constant(q, t), b: Poly::zero(q), c: Poly::zero(q), d: Poly::constant(q, finv(t % q, q)) }
    }

    pub fn entries(&self) -> [&Poly; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Applies the homography to a series.
    pub fn apply_laurent(&self, x: &Laurent, prec: usize) -> Result<Laurent, crate::exactnum::ExactError> {
        let wide = prec + 8 + self.a.degree().unwrap_or(0) + self.c.degree().unwrap_or(0);
        let lift = |p: &Poly| Laurent::from_poly(p, wide + p.degree().unwrap_or(0));
        let num = lift(&self.a).mul(x, usize::MAX).add(&lift(&self.b), usize::MAX);
        let den = lift(&self.c).mul(x, usize::MAX).add(&lift(&self.d), usize::MAX);
        num.div(&den, prec)
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `γα`, with minimal polynomial from substitution and exact root tracking.
pub fn act(g: &Mobius, x: &QuadIrr) -> QuadIrr {
    let q = x.modulus();
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    let (xa, xb, xc) = (x.a(), x.b(), x.c());
    // α = (dβ − b)/(a − cβ) substituted into A α² + B α + C.
    let na = &(&(xa * &(d * d)) - &(xb * &(d * c))) + &(xc * &(c * c));
    let nb = &(&(xb * &(&(a * d) + &(b * c))) - &(xa * &(d * b)).scale(2)) - &(xc * &(a * c)).scale(2);
    let nc = &(&(xa * &(b * b)) - &(xb * &(a * b))) + &(xc * &(a * a));
    // With α = (P + √D)/Q, γα = (U + Q√D)/V where V = (cP + dQ)² − c²D.
    let disc = x.discriminant();
    let (p, qq) = x.pq();
    let t = &(c * &p) + &(d * &qq);
    let v = &(&t * &t) - &(&(c * c) * &disc);
    let lc_sqrt = canonical_sqrt(disc.leading(), q).expect("valid discriminant");
    normalize(na, nb, nc, &qq, &v, lc_sqrt)
}
