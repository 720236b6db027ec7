//! Exact rationals: `p/q` parsing and formatting, plus float-to-rational
//! reconstruction via continued fractions.
//!
//! All exact arithmetic in the crate runs on [`Rat`], an arbitrary-precision
//! rational.  Serialized form is always the reduced string `"p"` or `"p/q"`,
//! never a float, so results survive JSON round trips bit-for-bit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// The rational p/q (q != 0).
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// The integer p as a rational.
pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Renders a reduced rational as `"p"` or `"p/q"`.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"` (optional sign, arbitrary precision).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let int = |t: &str| {
        t.parse::<BigInt>()
            .map_err(|_| Error::InvalidInput(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(int(s)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator: {s:?}")));
            }
            Ok(Rat::new(int(p)?, q))
        }
    }
}

/// Lossy conversion for reporting.
pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Default denominator bound for [`reconstruct_rational`].
pub const RECONSTRUCT_MAX_DENOM: u64 = 1 << 20;

/// Default acceptance tolerance for [`reconstruct_rational`].
pub const RECONSTRUCT_TOL: f64 = 1e-6;

/// Finds the first continued-fraction convergent of `x` with denominator at
/// most `max_denom` that lies within `tol` of `x`.  Returns `None` when no
/// such small-denominator rational exists, which callers treat as "this value
/// really is irrational" rather than an error.
pub fn reconstruct_rational(x: f64, max_denom: u64, tol: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    // Convergent recurrence p_k = a_k p_{k-1} + p_{k-2}, same for q.
    let (mut p_prev2, mut q_prev2) = (0i128, 1i128);
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let mut t = x;
    for _ in 0..64 {
        let a = t.floor();
        if a.abs() > 1e18 {
            return None;
        }
        let a = a as i128;
        let p = a.checked_mul(p_prev)?.checked_add(p_prev2)?;
        let q = a.checked_mul(q_prev)?.checked_add(q_prev2)?;
        if q.unsigned_abs() > u128::from(max_denom) {
            return None;
        }
        if q != 0 && (x - p as f64 / q as f64).abs() <= tol {
            return Some(Rat::new(BigInt::from(p), BigInt::from(q)));
        }
        let frac = t - t.floor();
        if frac.abs() < 1e-15 {
            return None;
        }
        t = 1.0 / frac;
        (p_prev2, q_prev2) = (p_prev, q_prev);
        (p_prev, q_prev) = (p, q);
    }
    None
}
