//! Rational functions 𝔽_q(X) in lowest terms.

use core::fmt;

use serde::{Deserialize, Serialize};

use super::{ExactError, Poly};

/// `num / den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let q = den.modulus();
        if num.is_zero() {
            return Ok(RatFunc { num, den: Poly::one(q) });
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g)?;
        let den = den.div_exact(&g)?;
        let lc = den.leading();
        let inv = super::field::inv(lc, q);
        Ok(RatFunc { num: num.scale(inv), den: den.scale(inv) })
    }

    pub fn from_poly(p: Poly) -> Self {
        let q = p.modulus();
        RatFunc { num: p, den: Poly::one(q) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn modulus(&self) -> u32 {
        self.den.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        Self::new(n, &self.den * &o.den).expect("nonzero denominator")
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        let n = &(&self.num * &o.den) - &(&o.num * &self.den);
        Self::new(n, &self.den * &o.den).expect("nonzero denominator")
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        Self::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero denominator")
    }

    pub fn inv(&self) -> Result<RatFunc, ExactError> {
        if self.is_zero() {
            return Err(ExactError::InverseOfZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, ExactError> {
        Ok(self.mul(&o.inv()?))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
