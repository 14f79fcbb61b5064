//! Exact rational coefficients.
//!
//! Coefficients stay exact everywhere except at the numerical boundary
//! ([`to_f64`]), so that sets such as `{-1, -2/3, -1/3, 0, 1/3, 2/3, 1}` can be
//! used as dictionary keys without rounding artefacts.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

pub type Rational = Ratio<i64>;

/// Maximum number of fractional digits accepted in a decimal literal.
pub const MAX_FRACTION_DIGITS: usize = 9;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecimalError {
    TooManyDigits,
    Overflow,
    Malformed,
}

/// Converts an unsigned decimal literal (`12`, `0.25`, `3.`) into an exact
/// rational.
pub fn parse_decimal(text: &str) -> Result<Rational, DecimalError> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(DecimalError::Malformed);
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(DecimalError::Malformed);
    }
    if frac_part.len() > MAX_FRACTION_DIGITS {
        return Err(DecimalError::TooManyDigits);
    }
    let mut num: i64 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        num = num
            .checked_mul(10)
            .and_then(|n| n.checked_add(i64::from(b - b'0')))
            .ok_or(DecimalError::Overflow)?;
    }
    let den = 10i64.pow(frac_part.len() as u32);
    Ok(Rational::new(num, den))
}

/// Parses `p/q`, `p`, or a signed decimal. Used for the vocabulary file and
/// `name=value` constants.
pub fn parse_rational(text: &str) -> Result<Rational, DecimalError> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text),
    };
    let value = match body.split_once('/') {
        Some((p, q)) => {
            let p = parse_decimal(p.trim())?;
            let q = parse_decimal(q.trim())?;
            if q.is_zero() {
                return Err(DecimalError::Malformed);
            }
            p / q
        }
        None => parse_decimal(body)?,
    };
    Ok(if neg { -value } else { value })
}

/// Always `p/q`, including integers (`-1/1`).
pub fn format_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
