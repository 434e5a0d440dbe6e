//! Dense univariate polynomials over 𝔽_q, lowest degree first.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::field;
use super::ExactError;

/// A polynomial in 𝔽_q[X]. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly {
    q: u32,
    coeffs: Vec<u32>,
}

impl Poly {
    /// Builds a polynomial from signed coefficients, reducing mod `q`.
    pub fn new(q: u32, coeffs: &[i64]) -> Self {
        Self::from_residues(q, coeffs.iter().map(|&c| field::reduce_i64(c, q)).collect())
    }

    /// Builds a polynomial from residues already in `0..q`.
    pub fn from_residues(q: u32, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { q, coeffs }
    }

    pub fn zero(q: u32) -> Self {
        Poly { q, coeffs: Vec::new() }
    }

    pub fn one(q: u32) -> Self {
        Self::constant(q, 1)
    }

    pub fn constant(q: u32, c: u32) -> Self {
        Self::from_residues(q, alloc::vec![c % q])
    }

    /// `c·X^deg`.
    pub fn monomial(q: u32, c: u32, deg: usize) -> Self {
        let mut v = alloc::vec![0; deg + 1];
        v[deg] = c % q;
        Self::from_residues(q, v)
    }

    /// The indeterminate `X`.
    pub fn x(q: u32) -> Self {
        Self::monomial(q, 1, 1)
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, c: u32) -> Poly {
        let q = self.q;
        Self::from_residues(q, self.coeffs.iter().map(|&a| field::mul(a, c, q)).collect())
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = alloc::vec![0; k];
        v.extend_from_slice(&self.coeffs);
        Poly { q: self.q, coeffs: v }
    }

    /// Scales so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(field::inv(self.leading(), self.q))
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), ExactError> {
        assert_eq!(self.q, d.q, "mixed moduli");
        let q = self.q;
        let dd = d.degree().ok_or(ExactError::DivisionByZero)?;
        let Some(n) = self.degree() else {
            return Ok((Poly::zero(q), Poly::zero(q)));
        };
        if n < dd {
            return Ok((Poly::zero(q), self.clone()));
        }
        let inv_lc = field::inv(d.leading(), q);
        let mut r = self.coeffs.clone();
        let mut quo = alloc::vec![0u32; n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = field::mul(r[i + dd], inv_lc, q);
            quo[i] = c;
            if c != 0 {
                for (j, &dj) in d.coeffs.iter().enumerate() {
                    r[i + j] = field::sub(r[i + j], field::mul(c, dj, q), q);
                }
            }
        }
        r.truncate(dd);
        Ok((Self::from_residues(q, quo), Self::from_residues(q, r)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly, ExactError> {
        let (quo, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(quo)
        } else {
            Err(ExactError::InexactDivision)
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Horner evaluation at a field element.
    pub fn eval(&self, x: u32) -> u32 {
        let q = self.q;
        self.coeffs.iter().rev().fold(0, |acc, &c| field::add(field::mul(acc, x, q), c, q))
    }

    /// Integer square root in 𝔽_q[X] when `self` is a perfect square.
    ///
    /// The returned root has the canonical leading coefficient.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        let q = self.q;
        let Some(n) = self.degree() else {
            return Some(self.clone());
        };
        if n % 2 == 1 {
            return None;
        }
        let m = n / 2;
        let lc = field::canonical_sqrt(self.leading(), q)?;
        // Coefficients of the root from the top down: r_m, r_{m-1}, ..., r_0.
        let top: Vec<u32> = self.coeffs.iter().rev().copied().collect();
        let mut r = alloc::vec![0u32; m + 1];
        r[0] = lc;
        let inv2 = field::inv(field::mul(2, lc, q), q);
        for k in 1..=m {
            let mut s = top[k];
            for i in 1..k {
                s = field::sub(s, field::mul(r[i], r[k - i], q), q);
            }
            r[k] = field::mul(s, inv2, q);
        }
        r.reverse();
        let root = Self::from_residues(q, r);
        if &(&root * &root) == self {
            Some(root)
        } else {
            None
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one(self.q);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Every polynomial of degree at most `max_deg`, in a fixed order.
    pub fn enumerate(q: u32, max_deg: usize) -> impl Iterator<Item = Poly> {
        let count = (q as u64).pow(max_deg as u32 + 1);
        (0..count).map(move |mut idx| {
            let mut v = Vec::with_capacity(max_deg + 1);
            for _ in 0..=max_deg {
                v.push((idx % q as u64) as u32);
                idx /= q as u64;
            }
            Poly::from_residues(q, v)
        })
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        assert_eq!(self.q, o.q, "mixed moduli");
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| field::add(self.coeff(i), o.coeff(i), self.q)).collect();
        Poly::from_residues(self.q, v)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        assert_eq!(self.q, o.q, "mixed moduli");
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| field::sub(self.coeff(i), o.coeff(i), self.q)).collect();
        Poly::from_residues(self.q, v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { q: self.q, coeffs: self.coeffs.iter().map(|&c| field::neg(c, self.q)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        assert_eq!(self.q, o.q, "mixed moduli");
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.q);
        }
        let q = self.q as u64;
        let mut acc = alloc::vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % q;
            }
        }
        Poly::from_residues(self.q, acc.into_iter().map(|c| c as u32).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "X")?,
                (1, _) => write!(f, "{c}X")?,
                (_, 1) => write!(f, "X^{i}")?,
                _ => write!(f, "{c}X^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_over_f3() {
        let a = Poly::new(3, &[1, 1]);
        let b = Poly::new(3, &[-1, 1]);
        assert_eq!(&a * &b, Poly::new(3, &[2, 0, 1]));
    }

    #[test]
    fn division_identity() {
        let q = 5;
        let a = Poly::new(q, &[3, 0, 2, 4, 1]);
        let d = Poly::new(q, &[1, 2, 3]);
        let (quo, r) = a.div_rem(&d).unwrap();
        assert_eq!(&(&quo * &d) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let q = 7;
        let f = Poly::new(q, &[1, 1]);
        let a = &f * &Poly::new(q, &[2, 0, 1]);
        let b = &f.scale(3) * &Poly::new(q, &[5, 1]);
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn square_roots() {
        let q = 3;
        let p = Poly::new(q, &[2, 1, 1]);
        let sq = &p * &p;
        let r = sq.sqrt_exact().unwrap();
        assert_eq!(&r * &r, sq);
        assert!(Poly::new(q, &[1, 0, 1]).sqrt_exact().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", Poly::new(3, &[2, 0, 1])), "X^2 + 2");
    }
}
