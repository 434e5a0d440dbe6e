//! Arithmetic in the prime field 𝔽_q.
//!
//! Residues are stored as `u32` in `0..q`; products go through `u64` so any
//! prime below `2^32` works.

use core::fmt;

use serde::{Deserialize, Serialize};

use super::ExactError;

/// Deterministic primality test by trial division (moduli here are small).
pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u64;
    while d * d <= q as u64 {
        if (q as u64).is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Checks that `q` is an odd prime, the only moduli this crate supports.
pub fn check_modulus(q: u32) -> Result<(), ExactError> {
    if q >= 3 && is_prime(q) {
        Ok(())
    } else {
        Err(ExactError::BadModulus(q))
    }
}

#[inline]
pub(crate) fn add(a: u32, b: u32, q: u32) -> u32 {
    let s = a as u64 + b as u64;
    if s >= q as u64 {
        (s - q as u64) as u32
    } else {
        s as u32
    }
}

#[inline]
pub(crate) fn sub(a: u32, b: u32, q: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + q as u64 - b as u64) as u32
    }
}

#[inline]
pub(crate) fn neg(a: u32, q: u32) -> u32 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

#[inline]
pub(crate) fn mul(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 * b as u64) % q as u64) as u32
}

pub(crate) fn pow(mut a: u32, mut e: u64, q: u32) -> u32 {
    let mut r = 1 % q;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, q);
        }
        a = mul(a, a, q);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue (Fermat).
#[inline]
pub(crate) fn inv(a: u32, q: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(q), "inverse of zero in F_q");
    pow(a, q as u64 - 2, q)
}

/// Reduces a signed integer into `0..q`.
pub fn reduce_i64(v: i64, q: u32) -> u32 {
    v.rem_euclid(q as i64) as u32
}

/// Euler's criterion. Zero counts as a square.
pub fn is_square(a: u32, q: u32) -> bool {
    a == 0 || pow(a, (q as u64 - 1) / 2, q) == 1
}

/// The canonical square root: the smaller of the two representatives.
///
/// Returns `None` for non-residues.
pub fn canonical_sqrt(a: u32, q: u32) -> Option<u32> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    if !is_square(a, q) {
        return None;
    }
    let r = tonelli_shanks(a, q);
    Some(r.min(q - r))
}

fn tonelli_shanks(a: u32, q: u32) -> u32 {
    if q % 4 == 3 {
        return pow(a, (q as u64 + 1) / 4, q);
    }
    let mut s = 0u32;
    let mut d = q as u64 - 1;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mut z = 2u32;
    while is_square(z, q) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow(z, d, q);
    let mut t = pow(a, d, q);
    let mut r = pow(a, d.div_ceil(2), q);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt, q);
            i += 1;
        }
        let b = pow(c, 1u64 << (m - i - 1), q);
        m = i;
        c = mul(b, b, q);
        t = mul(t, c, q);
        r = mul(r, b, q);
    }
    r
}

/// An element of 𝔽_q carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    value: u32,
    q: u32,
}

impl FieldElem {
    pub fn new(value: i64, q: u32) -> Self {
        FieldElem { value: reduce_i64(value, q), q }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self, ExactError> {
        if self.value == 0 {
            return Err(ExactError::InverseOfZero);
        }
        Ok(FieldElem { value: inv(self.value, self.q), q: self.q })
    }

    pub fn sqrt(self) -> Option<Self> {
        canonical_sqrt(self.value, self.q).map(|value| FieldElem { value, q: self.q })
    }
}

impl core::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        assert_eq!(self.q, o.q, "mixed moduli");
        FieldElem { value: add(self.value, o.value, self.q), q: self.q }
    }
}

impl core::ops::Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: FieldElem) -> FieldElem {
        assert_eq!(self.q, o.q, "mixed moduli");
        FieldElem { value: sub(self.value, o.value, self.q), q: self.q }
    }
}

impl core::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        assert_eq!(self.q, o.q, "mixed moduli");
        FieldElem { value: mul(self.value, o.value, self.q), q: self.q }
    }
}

impl core::ops::Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { value: neg(self.value, self.q), q: self.q }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
