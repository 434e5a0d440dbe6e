//! Exact arithmetic for 𝔽_q, 𝔽_q[X], 𝔽_q(X) and truncated 𝔽_q((X⁻¹)).

mod field;
mod laurent;
mod poly;
mod qmag;
mod ratfunc;

pub use field::{canonical_sqrt, check_modulus, is_prime, is_square, reduce_i64, FieldElem};
pub use laurent::{embed_ratfunc, lau_arith, sample_haar, sample_haar_with, LauOp, Laurent};
pub use poly::Poly;
pub use qmag::QMag;
pub use ratfunc::RatFunc;

pub(crate) use field::{inv as finv, mul as fmul, neg as fneg};

use alloc::string::String;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("modulus {0} is not an odd prime")]
    BadModulus(u32),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division has a remainder")]
    InexactDivision,
    #[error("precision exhausted; known up to index {attained}")]
    PrecisionExhausted { attained: i64 },
    #[error("no square root in the Laurent field")]
    NoSquareRoot,
    #[error("binary operation needs a second operand")]
    MissingOperand,
    #[error("cannot parse Laurent text {0:?}")]
    Parse(String),
}
