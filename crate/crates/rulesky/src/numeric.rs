//! Exact rational arithmetic helpers.
//!
//! All measure values are kept as exact rationals so that dominance
//! comparisons and threshold filters never depend on float rounding.
//! Decimal rendering is only applied at the output boundary.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Builds a rational from two machine integers.
pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders `r` as a plain decimal with up to `sig` significant digits.
///
/// Terminating expansions are emitted exactly and without trailing zeros, so
/// equal rationals always render identically. Non-terminating expansions are
/// truncated after `sig` significant digits, which keeps the absolute
/// rendering error below one unit of the last digit. With the 18 digits used
/// by the CSV writers this preserves every ordering produced from datasets of
/// up to roughly ten thousand transactions.
pub fn render_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();

    let int_part = &num / &den;
    let mut rem = &num % &den;
    let int_str = int_part.to_string();

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int_str);
    if rem.is_zero() {
        return out;
    }

    // Significant digits already consumed by the integer part.
    let used = if int_part.is_zero() { 0 } else { int_str.len() };
    let ten = BigInt::from(10u8);
    let mut frac = String::new();
    let mut seen_nonzero = used > 0;
    let mut remaining = sig.saturating_sub(used);
    while !rem.is_zero() && (remaining > 0 || !seen_nonzero) {
        rem *= &ten;
        let digit = &rem / &den;
        rem = &rem % &den;
        let d = digit.to_u8().expect("single decimal digit");
        frac.push((b'0' + d) as char);
        if d != 0 {
            seen_nonzero = true;
        }
        if seen_nonzero {
            remaining = remaining.saturating_sub(1);
        }
    }
    while frac.ends_with('0') {
        frac.pop();
    }
    if !frac.is_empty() {
        out.push('.');
        out.push_str(&frac);
    }
    out
}

/// Renders `r` truncated (toward zero) to exactly two decimal places.
pub fn trunc2(r: &Rational) -> String {
    let hundred = BigInt::from(100u8);
    let scaled = (r.numer() * &hundred) / r.denom();
    let neg = scaled.is_negative() && !scaled.is_zero();
    let abs = scaled.abs();
    let int = &abs / &hundred;
    let frac = &abs % &hundred;
    format!("{}{}.{:02}", if neg { "-" } else { "" }, int, frac)
}

/// Parses a plain decimal literal (optional sign, no exponent) exactly.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parameter(format!("not a decimal number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let (sign, rest) = match t.as_bytes()[0] {
        b'-' => (-1, &t[1..]),
        b'+' => (1, &t[1..]),
        _ => (1, t),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let mut den = BigInt::one();
    for _ in 0..frac_part.len() {
        den *= 10;
    }
    Ok(Rational::new(num * sign, den))
}
