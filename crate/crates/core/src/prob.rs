//! Exact probability values.
//!
//! Every probability the engine touches is a [`BigRational`]. Source
//! literals such as `0.25` are converted exactly, so LP feasibility never
//! depends on binary floating point rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational probability (or any exact rational quantity).
pub type Prob = BigRational;

/// Decimal literals may carry at most this many fractional digits.
pub const MAX_FRACTION_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("`{0}` has more than {MAX_FRACTION_DIGITS} fractional digits")]
    TooManyDigits(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Prob {
    Prob::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Prob {
    Prob::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `1`, `0.25`, `.5` or `3/4` into an exact rational.
pub fn parse_literal(text: &str) -> Result<Prob, LiteralError> {
    let malformed = || LiteralError::Malformed(text.to_string());
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num).ok_or_else(malformed)?;
        let den = parse_digits(den).ok_or_else(malformed)?;
        if den.is_zero() {
            return Err(LiteralError::ZeroDenominator(text.to_string()));
        }
        Prob::new(num, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if frac.len() > MAX_FRACTION_DIGITS {
            return Err(LiteralError::TooManyDigits(text.to_string()));
        }
        if whole.is_empty() && frac.is_empty() {
            return Err(malformed());
        }
        let whole = if whole.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(whole).ok_or_else(malformed)?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(frac).ok_or_else(malformed)?
        };
        Prob::new(whole * &scale + frac, scale)
    } else {
        Prob::from_integer(parse_digits(body).ok_or_else(malformed)?)
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Renders `p` as a terminating decimal when one with at most
/// [`MAX_FRACTION_DIGITS`] digits exists, and as `num/den` otherwise.
/// The output always parses back to `p` via [`parse_literal`].
pub fn format_decimal(p: &Prob) -> String {
    if p.is_integer() {
        return p.numer().to_string();
    }
    let ten = BigInt::from(10u32);
    let mut scale = BigInt::one();
    for digits in 1..=MAX_FRACTION_DIGITS {
        scale *= &ten;
        let (q, r) = (p.numer() * &scale).div_rem(p.denom());
        if r.is_zero() {
            let sign = if q.is_negative() { "-" } else { "" };
            let mag = q.abs().to_string();
            let padded = format!("{mag:0>width$}", width = digits + 1);
            let (whole, frac) = padded.split_at(padded.len() - digits);
            return format!("{sign}{whole}.{frac}");
        }
    }
    format!("{}/{}", p.numer(), p.denom())
}

/// Always `num/den`, including integers (`1/1`). Used by machine output.
pub fn format_ratio(p: &Prob) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Rounds a float onto the dyadic grid `k / 2^bits`.
pub fn from_f64_grid(x: f64, bits: u32) -> Prob {
    let scale = (bits as f64).exp2();
    let k = (x * scale).round();
    Prob::new(
        BigInt::from(k as i128),
        BigInt::one() << (bits as usize),
    )
}

pub fn in_unit(p: &Prob) -> bool {
    !p.is_negative() && *p <= Prob::one()
}
