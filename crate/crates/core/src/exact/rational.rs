//! Helpers for arbitrary-precision rationals.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Exact rational scalar: reduced fraction with positive denominator.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational n/d.
pub fn rat_i64(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Height of p/q in lowest terms: max(|p|, q).
pub fn rat_height(r: &Rat) -> BigInt {
    let p = r.numer().abs();
    let q = r.denom().abs();
    if p > q {
        p
    } else {
        q
    }
}

/// If `r` is the square of a rational, returns the nonnegative square root.
pub fn is_square(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rat::zero());
    }
    let pn = r.numer().sqrt();
    let pd = r.denom().sqrt();
    if &(&pn * &pn) == r.numer() && &(&pd * &pd) == r.denom() {
        Some(Rat::new(pn, pd))
    } else {
        None
    }
}

/// Parses "p" or "p/q".
pub fn parse_rat(text: &str) -> Result<Rat, String> {
    let t = text.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
            let q: BigInt = q.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|e| format!("bad integer: {e}"))?;
            Ok(Rat::from_integer(p))
        }
    }
}

/// Formats as "p" or "p/q" in lowest terms.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
