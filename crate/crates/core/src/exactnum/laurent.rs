//! Truncated Laurent series in `X^{-1}` over 𝔽_q, i.e. elements of
//! 𝔽_q((X⁻¹)) known to a finite number of coefficients.
//!
//! A series is `Σ a_i X^{-i}` for `i ≥ ν`. Index `i` always refers to the
//! coefficient of `X^{-i}`, so polynomials live at non-positive indices.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{field, ExactError, Poly, QMag, RatFunc};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Body {
    /// Zero, either exactly (`abs = None`) or only known to vanish on every
    /// index below `abs`.
    Zero { abs: Option<i64> },
    /// `coeffs[k]` is `a_{val+k}`; `coeffs[0] != 0`.
    Series { val: i64, coeffs: Vec<u32> },
}

/// An element of 𝔽_q((X⁻¹)) with tracked precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Laurent {
    q: u32,
    body: Body,
}

/// The binary/unary operations accepted by [`lau_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LauOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
}

/// Dispatches a field operation; `g` is ignored for `Inv`.
pub fn lau_arith(op: LauOp, f: &Laurent, g: Option<&Laurent>, prec: usize) -> Result<Laurent, ExactError> {
    let need = || g.ok_or(ExactError::MissingOperand);
    match op {
        LauOp::Add => Ok(f.add(need()?, prec)),
        LauOp::Sub => Ok(f.sub(need()?, prec)),
        LauOp::Mul => Ok(f.mul(need()?, prec)),
        LauOp::Div => f.div(need()?, prec),
        LauOp::Inv => f.inv(prec),
    }
}

impl Laurent {
    /// Builds a series from coefficients `a_val, a_{val+1}, ...`.
    ///
    /// Leading zeros are absorbed into the valuation; an all-zero window
    /// becomes a zero known up to index `val + len`.
    pub fn from_coeffs(q: u32, val: i64, mut coeffs: Vec<u32>) -> Laurent {
        for c in coeffs.iter_mut() {
            *c %= q;
        }
        match coeffs.iter().position(|&c| c != 0) {
            None => Laurent { q, body: Body::Zero { abs: Some(val + coeffs.len() as i64) } },
            Some(k) => {
                coeffs.drain(..k);
                Laurent { q, body: Body::Series { val: val + k as i64, coeffs } }
            }
        }
    }

    pub fn zero(q: u32) -> Laurent {
        Laurent { q, body: Body::Zero { abs: None } }
    }

    /// `c·X^{-val}` known to `prec` coefficients.
    pub fn monomial(q: u32, c: u32, val: i64, prec: usize) -> Laurent {
        let mut v = alloc::vec![0; prec.max(1)];
        v[0] = c % q;
        Self::from_coeffs(q, val, v)
    }

    pub fn one(q: u32, prec: usize) -> Laurent {
        Self::monomial(q, 1, 0, prec)
    }

    /// A polynomial viewed as a series, known to `prec` coefficients.
    pub fn from_poly(p: &Poly, prec: usize) -> Laurent {
        let q = p.modulus();
        let Some(d) = p.degree() else {
            return Laurent::zero(q);
        };
        let mut v: Vec<u32> = p.coeffs().iter().rev().copied().collect();
        v.resize(prec.max(1), 0);
        Self::from_coeffs(q, -(d as i64), v)
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// True for the exact zero and for series only known to vanish.
    pub fn is_zero(&self) -> bool {
        matches!(self.body, Body::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.body, Body::Zero { abs: None })
    }

    /// The valuation ν, if the series is known to be nonzero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.body {
            Body::Series { val, .. } => Some(*val),
            Body::Zero { .. } => None,
        }
    }

    /// `(ν(f), |f|)` with `|f| = q^{-ν(f)}`; zero maps to the zero magnitude.
    pub fn valuation_abs(&self) -> (Option<i64>, QMag) {
        match self.valuation() {
            Some(v) => (Some(v), QMag::Pow(v)),
            None => (None, QMag::Zero),
        }
    }

    /// Number of known coefficients counted from the leading one.
    pub fn precision(&self) -> usize {
        match &self.body {
            Body::Series { coeffs, .. } => coeffs.len(),
            Body::Zero { .. } => 0,
        }
    }

    /// First index whose coefficient is unknown (`None` for exact zero).
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.body {
            Body::Series { val, coeffs } => Some(val + coeffs.len() as i64),
            Body::Zero { abs } => *abs,
        }
    }

    /// Leading coefficient `a_ν`, or 0 for zero.
    pub fn leading(&self) -> u32 {
        match &self.body {
            Body::Series { coeffs, .. } => coeffs[0],
            Body::Zero { .. } => 0,
        }
    }

    /// The known coefficients starting at `a_ν`.
    pub fn coeffs(&self) -> &[u32] {
        match &self.body {
            Body::Series { coeffs, .. } => coeffs,
            Body::Zero { .. } => &[],
        }
    }

    /// Coefficient of `X^{-i}` if it is known.
    pub fn coeff(&self, i: i64) -> Option<u32> {
        match &self.body {
            Body::Zero { abs } => match abs {
                Some(a) if i >= *a => None,
                _ => Some(0),
            },
            Body::Series { val, coeffs } => {
                if i < *val {
                    Some(0)
                } else {
                    coeffs.get((i - val) as usize).copied()
                }
            }
        }
    }

    /// Keeps at most `prec` coefficients.
    pub fn truncate(&self, prec: usize) -> Laurent {
        match &self.body {
            Body::Series { val, coeffs } if coeffs.len() > prec.max(1) => {
                let mut c = coeffs.clone();
                c.truncate(prec.max(1));
                Laurent { q: self.q, body: Body::Series { val: *val, coeffs: c } }
            }
            _ => self.clone(),
        }
    }

    /// Drops every coefficient at index `≥ abs`.
    pub fn truncate_abs(&self, abs: i64) -> Laurent {
        match &self.body {
            Body::Zero { abs: a } => Laurent {
                q: self.q,
                body: Body::Zero { abs: Some(a.map_or(abs, |a| a.min(abs))) },
            },
            Body::Series { val, coeffs } => {
                if abs <= *val {
                    return Laurent { q: self.q, body: Body::Zero { abs: Some(abs) } };
                }
                let keep = ((abs - val) as usize).min(coeffs.len());
                Laurent { q: self.q, body: Body::Series { val: *val, coeffs: coeffs[..keep].to_vec() } }
            }
        }
    }

    pub fn neg(&self) -> Laurent {
        match &self.body {
            Body::Zero { .. } => self.clone(),
            Body::Series { val, coeffs } => Laurent {
                q: self.q,
                body: Body::Series { val: *val, coeffs: coeffs.iter().map(|&c| field::neg(c, self.q)).collect() },
            },
        }
    }

    /// Multiplies by a nonzero constant.
    pub fn scale(&self, c: u32) -> Laurent {
        let c = c % self.q;
        assert!(c != 0, "scaling by zero");
        match &self.body {
            Body::Zero { .. } => self.clone(),
            Body::Series { val, coeffs } => Laurent {
                q: self.q,
                body: Body::Series { val: *val, coeffs: coeffs.iter().map(|&a| field::mul(a, c, self.q)).collect() },
            },
        }
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: i64) -> Laurent {
        let body = match &self.body {
            Body::Zero { abs } => Body::Zero { abs: abs.map(|a| a - k) },
            Body::Series { val, coeffs } => Body::Series { val: val - k, coeffs: coeffs.clone() },
        };
        Laurent { q: self.q, body }
    }

    pub fn add(&self, g: &Laurent, prec: usize) -> Laurent {
        self.combine(g, prec, field::add)
    }

    pub fn sub(&self, g: &Laurent, prec: usize) -> Laurent {
        self.combine(g, prec, field::sub)
    }

    fn combine(&self, g: &Laurent, prec: usize, op: fn(u32, u32, u32) -> u32) -> Laurent {
        assert_eq!(self.q, g.q, "mixed moduli");
        let q = self.q;
        let abs = match (self.abs_precision(), g.abs_precision()) {
            (None, None) => return Laurent::zero(q),
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        let lo = match (self.valuation(), g.valuation()) {
            (None, None) => return Laurent { q, body: Body::Zero { abs: Some(abs) } },
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        if lo >= abs {
            return Laurent { q, body: Body::Zero { abs: Some(abs) } };
        }
        // abs - lo is bounded by the longer operand's window.
        let coeffs: Vec<u32> = (lo..abs)
            .map(|i| op(self.coeff(i).unwrap_or(0), g.coeff(i).unwrap_or(0), q))
            .collect();
        Self::from_coeffs(q, lo, coeffs).truncate(prec)
    }

    pub fn mul(&self, g: &Laurent, prec: usize) -> Laurent {
        assert_eq!(self.q, g.q, "mixed moduli");
        let q = self.q;
        match (&self.body, &g.body) {
            (Body::Zero { abs: None }, _) | (_, Body::Zero { abs: None }) => Laurent::zero(q),
            (Body::Zero { abs: Some(a) }, Body::Zero { abs: Some(b) }) => {
                Laurent { q, body: Body::Zero { abs: Some(a + b) } }
            }
            (Body::Zero { abs: Some(a) }, Body::Series { val, .. })
            | (Body::Series { val, .. }, Body::Zero { abs: Some(a) }) => {
                Laurent { q, body: Body::Zero { abs: Some(a + val) } }
            }
            (Body::Series { val: v1, coeffs: c1 }, Body::Series { val: v2, coeffs: c2 }) => {
                let n = c1.len().min(c2.len()).min(prec.max(1));
                let coeffs = series_mul(c1, c2, n, q);
                Laurent { q, body: Body::Series { val: v1 + v2, coeffs } }
            }
        }
    }

    pub fn inv(&self, prec: usize) -> Result<Laurent, ExactError> {
        match &self.body {
            Body::Zero { abs: None } => Err(ExactError::InverseOfZero),
            Body::Zero { abs: Some(a) } => Err(ExactError::PrecisionExhausted { attained: *a }),
            Body::Series { val, coeffs } => {
                let n = coeffs.len().min(prec.max(1));
                Ok(Laurent { q: self.q, body: Body::Series { val: -val, coeffs: series_inv(coeffs, n, self.q) } })
            }
        }
    }

    pub fn div(&self, g: &Laurent, prec: usize) -> Result<Laurent, ExactError> {
        Ok(self.mul(&g.inv(prec)?, prec))
    }

    /// Square root on the canonical branch (smallest leading residue).
    pub fn sqrt(&self, prec: usize) -> Result<Laurent, ExactError> {
        let q = self.q;
        match &self.body {
            Body::Zero { abs } => Ok(Laurent { q, body: Body::Zero { abs: abs.map(|a| a.div_euclid(2)) } }),
            Body::Series { val, coeffs } => {
                if val.rem_euclid(2) != 0 {
                    return Err(ExactError::NoSquareRoot);
                }
                let r0 = field::canonical_sqrt(coeffs[0], q).ok_or(ExactError::NoSquareRoot)?;
                let n = coeffs.len().min(prec.max(1));
                let mut r = alloc::vec![0u32; n];
                r[0] = r0;
                let inv2 = field::inv(field::mul(2, r0, q), q);
                for k in 1..n {
                    let mut s = coeffs[k];
                    for i in 1..k {
                        s = field::sub(s, field::mul(r[i], r[k - i], q), q);
                    }
                    r[k] = field::mul(s, inv2, q);
                }
                Ok(Laurent { q, body: Body::Series { val: val / 2, coeffs: r } })
            }
        }
    }

    /// Lower bound on `ν(self - other)` from the common known window.
    ///
    /// `Ok(v)` means the difference has valuation exactly `v`; `Err(a)` means
    /// the two agree on every index below `a` and nothing more is known.
    pub fn diff_valuation(&self, other: &Laurent) -> Result<i64, i64> {
        let d = self.sub(other, usize::MAX);
        match d.valuation() {
            Some(v) => Ok(v),
            None => Err(d.abs_precision().unwrap_or(i64::MAX)),
        }
    }

    /// The polynomial part `Σ_{i ≤ 0} a_i X^{-i}`, if those digits are known.
    pub fn polynomial_part(&self) -> Result<Poly, ExactError> {
        let q = self.q;
        if let Some(a) = self.abs_precision() {
            if a <= 0 {
                return Err(ExactError::PrecisionExhausted { attained: a });
            }
        }
        match self.valuation() {
            None => Ok(Poly::zero(q)),
            Some(v) if v > 0 => Ok(Poly::zero(q)),
            Some(v) => {
                let deg = (-v) as usize;
                let c = (0..=deg).map(|d| self.coeff(-(d as i64)).unwrap_or(0)).collect();
                Ok(Poly::from_residues(q, c))
            }
        }
    }

    /// Textual form `q:ν:c0,c1,...`; zero is `q:zero` or `q:zero@A`.
    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Zero { abs: None } => write!(f, "{}:zero", self.q),
            Body::Zero { abs: Some(a) } => write!(f, "{}:zero@{}", self.q, a),
            Body::Series { val, coeffs } => {
                write!(f, "{}:{}:", self.q, val)?;
                for (k, c) in coeffs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Laurent {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Laurent, ExactError> {
        let bad = || ExactError::Parse(String::from(s));
        let mut parts = s.trim().splitn(3, ':');
        let q: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        field::check_modulus(q)?;
        let second = parts.next().ok_or_else(bad)?;
        if let Some(rest) = second.strip_prefix("zero") {
            if parts.next().is_some() {
                return Err(bad());
            }
            return match rest.strip_prefix('@') {
                None if rest.is_empty() => Ok(Laurent::zero(q)),
                Some(a) => Ok(Laurent { q, body: Body::Zero { abs: Some(a.parse().map_err(|_| bad())?) } }),
                None => Err(bad()),
            };
        }
        let val: i64 = second.parse().map_err(|_| bad())?;
        let coeffs: Vec<u32> = parts
            .next()
            .ok_or_else(bad)?
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if coeffs.is_empty() || coeffs[0] == 0 || coeffs.iter().any(|&c| c >= q) {
            return Err(bad());
        }
        Ok(Laurent { q, body: Body::Series { val, coeffs } })
    }
}

/// Expands a rational function by long division in `X^{-1}`.
pub fn embed_ratfunc(r: &RatFunc, prec: usize) -> Laurent {
    let q = r.modulus();
    let Some(n) = r.num().degree() else {
        return Laurent::zero(q);
    };
    let d = r.den().degree().expect("nonzero denominator");
    let num: Vec<u32> = r.num().coeffs().iter().rev().copied().collect();
    let den: Vec<u32> = r.den().coeffs().iter().rev().copied().collect();
    let n_out = prec.max(1);
    let inv = series_inv(&den, n_out, q);
    let coeffs = series_mul(&num, &inv, n_out, q);
    Laurent::from_coeffs(q, d as i64 - n as i64, coeffs)
}

/// Haar sample `Σ_{k<prec} c_k X^{-(floor+k)}` with i.i.d. uniform digits.
///
/// With `floor = 1` this samples the ring `X⁻¹𝔽_q[[X⁻¹]]`, normalized to mass 1.
pub fn sample_haar(q: u32, valuation_floor: i64, prec: usize, seed: u64) -> Laurent {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_haar_with(q, valuation_floor, prec, &mut rng)
}

/// [`sample_haar`] drawing from a caller-owned generator.
pub fn sample_haar_with<R: Rng + ?Sized>(q: u32, valuation_floor: i64, prec: usize, rng: &mut R) -> Laurent {
    let coeffs = (0..prec.max(1)).map(|_| rng.gen_range(0..q)).collect();
    Laurent::from_coeffs(q, valuation_floor, coeffs)
}

/// First `n` coefficients of the product of two power series.
pub(crate) fn series_mul(a: &[u32], b: &[u32], n: usize, q: u32) -> Vec<u32> {
    let qq = q as u64;
    let mut out = alloc::vec![0u32; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut s = 0u64;
        let lo = k.saturating_sub(b.len().saturating_sub(1));
        for i in lo..=k.min(a.len().saturating_sub(1)) {
            if i < a.len() && k - i < b.len() {
                s = (s + a[i] as u64 * b[k - i] as u64) % qq;
            }
        }
        *slot = s as u32;
    }
    out
}

/// First `n` coefficients of `1/a` for a power series with `a[0] != 0`.
pub(crate) fn series_inv(a: &[u32], n: usize, q: u32) -> Vec<u32> {
    let qq = q as u64;
    let inv0 = field::inv(a[0], q);
    let mut r = alloc::vec![0u32; n];
    r[0] = inv0;
    for k in 1..n {
        let mut s = 0u64;
        for i in 1..=k.min(a.len() - 1) {
            s = (s + a[i] as u64 * r[k - i] as u64) % qq;
        }
        r[k] = field::mul(field::neg(s as u32, q), inv0, q);
    }
    r
}
