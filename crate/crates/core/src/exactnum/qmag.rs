//! Exact magnitudes `q^{-e}` on the non-archimedean absolute value.

use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Either zero or `q^{-e}` for an integer exponent `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QMag {
    Zero,
    Pow(i64),
}

impl QMag {
    pub const ONE: QMag = QMag::Pow(0);

    /// The magnitude `q^k`.
    pub fn q_pow(k: i64) -> QMag {
        QMag::Pow(-k)
    }

    /// `e` such that the magnitude is `q^{-e}`.
    pub fn exponent(self) -> Option<i64> {
        match self {
            QMag::Zero => None,
            QMag::Pow(e) => Some(e),
        }
    }

    /// `log_q` of the magnitude.
    pub fn log_q(self) -> Option<i64> {
        self.exponent().map(|e| -e)
    }

    pub fn recip(self) -> Option<QMag> {
        match self {
            QMag::Zero => None,
            QMag::Pow(e) => Some(QMag::Pow(-e)),
        }
    }

    /// Converts to a float; only for reporting.
    pub fn to_f64(self, q: u32) -> f64 {
        match self {
            QMag::Zero => 0.0,
            QMag::Pow(e) => libm::pow(q as f64, -(e as f64)),
        }
    }
}

impl core::ops::Mul for QMag {
    type Output = QMag;
    fn mul(self, o: QMag) -> QMag {
        match (self, o) {
            (QMag::Pow(a), QMag::Pow(b)) => QMag::Pow(a + b),
            _ => QMag::Zero,
        }
    }
}

impl Ord for QMag {
    fn cmp(&self, o: &QMag) -> Ordering {
        match (self, o) {
            (QMag::Zero, QMag::Zero) => Ordering::Equal,
            (QMag::Zero, _) => Ordering::Less,
            (_, QMag::Zero) => Ordering::Greater,
            (QMag::Pow(a), QMag::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for QMag {
    fn partial_cmp(&self, o: &QMag) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for QMag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QMag::Zero => write!(f, "0"),
            QMag::Pow(e) => write!(f, "q^{}", -e),
        }
    }
}
