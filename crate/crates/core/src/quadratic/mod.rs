//! Quadratic irrationals over 𝔽_q(X): expansions, heights, Artin continued
//! fractions, the homography action of SL₂(𝔽_q[X]) and orbit enumeration.

mod cf;
mod mobius;
mod orbit;

pub use cf::{cf_expand, cf_expand_rational, convergents, CfExpansion, CfOutcome};
pub use mobius::{act, Mobius};
pub use orbit::{fractional_part, orbit_enumerate, OrbitConfig, OrbitResult};

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{canonical_sqrt, fmul, finv, ExactError, Laurent, Poly, QMag};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    #[error("leading coefficient A is zero")]
    ZeroLeading,
    #[error("discriminant is a square: the root is rational")]
    SquareDiscriminant,
    #[error("discriminant has odd degree or non-residue leading coefficient: no root in the Laurent field")]
    RootNotInField,
    #[error("matrix determinant is not 1")]
    BadDeterminant,
    #[error("continued fraction exceeded the state budget of {0}")]
    StateBudget(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Root selector: the sign of the root term relative to the canonical root of `D/4A²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn as_residue(self, q: u32) -> u32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => q - 1,
        }
    }
}

/// A root of `A Y² + B Y + C` in 𝔽_q((X⁻¹)), in canonical form: `A` monic and
/// `gcd(A, B, C) = 1`.
///
/// `sigma` picks `−B/2A ± r` where `r` is the canonical square root of
/// `D/4A²` (leading coefficient the smaller residue), `D = B² − 4AC`. For
/// `Y² − (X² + 1)` over 𝔽₃ the `+` root is `X + 2X⁻¹ + …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadIrr {
    a: Poly,
    b: Poly,
    c: Poly,
    sigma: Sign,
}

impl QuadIrr {
    /// Validates and normalizes `(A, B, C, σ)`.
    pub fn new(a: Poly, b: Poly, c: Poly, sigma: Sign) -> Result<QuadIrr, QuadError> {
        if a.is_zero() {
            return Err(QuadError::ZeroLeading);
        }
        let q = a.modulus();
        let d = discriminant(&a, &b, &c);
        check_discriminant(&d)?;
        let lc_sqrt = canonical_sqrt(d.leading(), q).expect("checked residue");
        // α = −B/2A + σ·r where r is the canonical root of D/4A², i.e.
        // r = t·√D/2A for the sign t making its leading coefficient canonical.
        let t = branch_of(q, d.leading(), a.leading());
        let num = Poly::constant(q, (if sigma == t { Sign::Plus } else { Sign::Minus }).as_residue(q));
        let den = a.scale(2);
        Ok(normalize(a, b, c, &num, &den, lc_sqrt))
    }

    /// The base point used by default in experiments: a root of `Y² − (X² + 1)`.
    pub fn default_base(q: u32) -> QuadIrr {
        let c = Poly::new(q, &[-1, 0, -1]);
        QuadIrr::new(Poly::one(q), Poly::zero(q), c, Sign::Plus).expect("X^2 + 1 is not a square")
    }

    pub fn modulus(&self) -> u32 {
        self.a.modulus()
    }

    pub fn a(&self) -> &Poly {
        &self.a
    }

    pub fn b(&self) -> &Poly {
        &self.b
    }

    pub fn c(&self) -> &Poly {
        &self.c
    }

    pub fn sigma(&self) -> Sign {
        self.sigma
    }

    /// `D = B² − 4AC`.
    pub fn discriminant(&self) -> Poly {
        discriminant(&self.a, &self.b, &self.c)
    }

    /// The Galois conjugate α*.
    pub fn conjugate(&self) -> QuadIrr {
        QuadIrr { sigma: self.sigma.flip(), ..self.clone() }
    }

    /// Sign of α's root term relative to the canonical `√D` itself.
    fn branch(&self) -> Sign {
        let q = self.modulus();
        let t = branch_of(q, self.discriminant().leading(), 1);
        if t == Sign::Plus {
            self.sigma
        } else {
            self.sigma.flip()
        }
    }

    /// `(P, Q)` with `α = (P + √D) / Q` for the canonical `√D`, and `Q | D − P²`.
    pub fn pq(&self) -> (Poly, Poly) {
        match self.branch() {
            Sign::Plus => (-&self.b, self.a.scale(2)),
            Sign::Minus => (self.b.clone(), -&self.a.scale(2)),
        }
    }

    /// Series expansion known to `prec` coefficients.
    pub fn expand(&self, prec: usize) -> Laurent {
        let d = self.discriminant();
        let dd = d.degree().expect("nonzero discriminant");
        let (p, qq) = self.pq();
        let mut w = prec.max(1) + 2;
        loop {
            let dl = Laurent::from_poly(&d, w + dd);
            let s = dl.sqrt(w + dd).expect("validated discriminant");
            let pl = Laurent::from_poly(&p, w + dd + p.degree().unwrap_or(0) + 2);
            let num = pl.add(&s, usize::MAX);
            if num.precision() >= prec.max(1) {
                let den = Laurent::from_poly(&qq, w + prec);
                return num.div(&den, prec.max(1)).expect("nonzero denominator");
            }
            w *= 2;
        }
    }

    /// `h(α) = |α − α*|⁻¹ = |A| · q^{-deg D / 2}`, exact.
    pub fn height(&self) -> QMag {
        QMag::q_pow(self.height_log_q())
    }

    /// `log_q h(α)`.
    pub fn height_log_q(&self) -> i64 {
        let dd = self.discriminant().degree().expect("nonzero") as i64;
        self.a.degree().expect("nonzero") as i64 - dd / 2
    }

    /// The height recomputed from series expansions of α and α*.
    pub fn height_from_expansion(&self, prec: usize) -> QMag {
        let x = self.expand(prec);
        let y = self.conjugate().expand(prec);
        match x.sub(&y, prec).valuation_abs() {
            (Some(_), m) => m.recip().expect("nonzero"),
            (None, _) => panic!("α and α* agree to the requested precision"),
        }
    }

    /// Polynomial part of α, computed exactly.
    pub fn floor(&self) -> Poly {
        let (p, qq) = self.pq();
        let w = sqrt_floor(&self.discriminant());
        (&p + &w).div_rem(&qq).expect("nonzero").0
    }
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sigma {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "root[{s}] of ({})Y^2 + ({})Y + ({})", self.a, self.b, self.c)
    }
}

/// `+` when `√D / 2A` already has the canonical leading coefficient of
/// `√(D/4A²)`, given the leading coefficients of `D` and `A`.
fn branch_of(q: u32, lc_d: u32, lc_a: u32) -> Sign {
    let s = canonical_sqrt(lc_d, q).expect("residue");
    let lead = fmul(s, finv(fmul(2, lc_a, q), q), q);
    let want = canonical_sqrt(fmul(lc_d, finv(fmul(4, fmul(lc_a, lc_a, q), q), q), q), q).expect("residue");
    if lead == want {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn discriminant(a: &Poly, b: &Poly, c: &Poly) -> Poly {
    &(b * b) - &(a * c).scale(4)
}

fn check_discriminant(d: &Poly) -> Result<(), QuadError> {
    let q = d.modulus();
    let deg = d.degree().ok_or(QuadError::SquareDiscriminant)?;
    if d.sqrt_exact().is_some() {
        return Err(QuadError::SquareDiscriminant);
    }
    if deg % 2 == 1 || canonical_sqrt(d.leading(), q).is_none() {
        return Err(QuadError::RootNotInField);
    }
    Ok(())
}

/// Polynomial part of the canonical `√D`.
pub(crate) fn sqrt_floor(d: &Poly) -> Poly {
    let dd = d.degree().expect("nonzero");
    let prec = dd / 2 + 2;
    Laurent::from_poly(d, prec).sqrt(prec).expect("validated").polynomial_part().expect("enough digits")
}

/// Brings `(A, B, C)` to canonical form for the root whose `√D_ref`
/// coefficient is `num / den`, where `lc_sqrt` is the leading coefficient of
/// the canonical `√D_ref`.
pub(crate) fn normalize(a: Poly, b: Poly, c: Poly, num: &Poly, den: &Poly, lc_sqrt: u32) -> QuadIrr {
    let q = a.modulus();
    let g = a.gcd(&b).gcd(&c);
    let (mut a, mut b, mut c) = (
        a.div_exact(&g).expect("gcd divides"),
        b.div_exact(&g).expect("gcd divides"),
        c.div_exact(&g).expect("gcd divides"),
    );
    let inv = finv(a.leading(), q);
    a = a.scale(inv);
    b = b.scale(inv);
    c = c.scale(inv);
    let d = discriminant(&a, &b, &c);
    // The root is −B/2A + (num/den)·√D_ref; the sign is read off the leading
    // coefficient of that offset, compared with the canonical root of D/4A².
    let target = canonical_sqrt(fmul(d.leading(), finv(4, q), q), q).expect("residue class preserved");
    let lead = fmul(fmul(num.leading(), finv(den.leading(), q), q), lc_sqrt, q);
    let sigma = if lead == target { Sign::Plus } else { Sign::Minus };
    debug_assert!(lead == target || lead == crate::exactnum::fneg(target, q));
    QuadIrr { a, b, c, sigma }
}

/// A random valid quadratic irrational with coefficients of degree ≤ `max_deg`.
pub fn random_quadirr<R: rand::Rng + ?Sized>(q: u32, max_deg: usize, rng: &mut R) -> QuadIrr {
    fn rp<R: rand::Rng + ?Sized>(q: u32, max_deg: usize, rng: &mut R) -> Poly {
        let deg = rng.gen_range(0..=max_deg);
        let v: Vec<u32> = (0..=deg).map(|_| rng.gen_range(0..q)).collect();
        Poly::from_residues(q, v)
    }
    loop {
        let a = rp(q, max_deg, rng);
        let b = rp(q, max_deg, rng);
        let c = rp(q, max_deg, rng);
        let s = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        if let Ok(x) = QuadIrr::new(a, b, c, s) {
            return x;
        }
    }
}
