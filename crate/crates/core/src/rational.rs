//! Exact probabilities.

use num_traits::{ToPrimitive, Zero};
use std::str::FromStr;

/// Exact nonnegative rational with 128-bit numerator and denominator.
pub type Rational = num_rational::Ratio<u128>;

/// `n / d`, reduced. Panics if `d == 0`.
pub fn ratio(n: u128, d: u128) -> Rational {
    Rational::new(n, d)
}

/// `|a - b|`.
pub fn abs_diff(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// Lossy conversion for reporting and for the few estimators that document floating point.
pub fn to_f64(r: Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Parses `"3/8"`, `"0.25"` or `"2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = u128::from_str(n.trim()).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
        let d = u128::from_str(d.trim()).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(ratio(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let int = if int.is_empty() {
            0
        } else {
            u128::from_str(int).map_err(|e| format!("bad decimal {s:?}: {e}"))?
        };
        let scale = 10u128.pow(frac.len() as u32);
        let frac_v = if frac.is_empty() {
            0
        } else {
            u128::from_str(frac).map_err(|e| format!("bad decimal {s:?}: {e}"))?
        };
        let n = int
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(|| format!("decimal {s:?} overflows"))?;
        return Ok(ratio(n, scale));
    }
    u128::from_str(s)
        .map(Rational::from_integer)
        .map_err(|e| format!("bad number {s:?}: {e}"))
}

/// Smallest integer `>= r`.
pub fn ceil_u128(r: Rational) -> u128 {
    let (n, d) = (*r.numer(), *r.denom());
    n / d + u128::from(n % d != 0)
}

/// Largest integer `<= r`.
pub fn floor_u128(r: Rational) -> u128 {
    r.numer() / r.denom()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("3/12").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("2").unwrap(), ratio(2, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(ceil_u128(ratio(7, 2)), 4);
        assert_eq!(floor_u128(ratio(7, 2)), 3);
        assert_eq!(ceil_u128(ratio(8, 2)), 4);
        assert_eq!(abs_diff(ratio(1, 4), ratio(3, 4)), ratio(1, 2));
    }
}
