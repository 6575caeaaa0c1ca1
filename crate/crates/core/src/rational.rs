//! Exact rational helpers: parsing `p/q` strings and rendering for reports.

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Denominators must be positive.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if !den.is_positive() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `p/q` form, or plain `p` for integers.
pub fn render(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal approximation with six significant digits, trailing zeros trimmed.
pub fn decimal(value: &Rational) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let x = value.to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exponent) {
        return format!("{:.5e}", x);
    }
    let places = (5 - exponent).max(0) as usize;
    let mut s = format!("{:.*}", places, x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Human-readable form used by text reports: `-1/16 (-0.0625)`.
pub fn pretty(value: &Rational) -> String {
    if value.is_integer() {
        render(value)
    } else {
        format!("{} ({})", render(value), decimal(value))
    }
}
