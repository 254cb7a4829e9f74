//! Exact rational parameters.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"a/b"`, an integer, or a decimal such as `"0.75"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(num, den);
    Ok(if negative { -value } else { value })
}

/// Formats as `"num/den"`, also for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fails unless `0 <= p <= 1`.
pub fn check_unit_interval(p: &Rational) -> Result<()> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::OutOfRange(format!("p = {} must lie in [0, 1]", format_rational(p))));
    }
    Ok(())
}

/// Lossy conversion for display only.
pub fn to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), rational(1, 2));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("0.75").unwrap(), rational(3, 4));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("1").unwrap(), integer(1));
        assert_eq!(parse_rational("-0.1").unwrap(), rational(-1, 10));
        assert_eq!(parse_rational("0.3333").unwrap(), rational(3333, 10000));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "a", "1.2.3", "1e3", ".", "1/x"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&integer(3)), "3/1");
        assert_eq!(format_rational(&rational(6, 4)), "3/2");
    }

    #[test]
    fn unit_interval() {
        assert!(check_unit_interval(&rational(1, 2)).is_ok());
        assert!(check_unit_interval(&integer(0)).is_ok());
        assert!(check_unit_interval(&integer(1)).is_ok());
        assert!(check_unit_interval(&rational(3, 2)).is_err());
        assert!(check_unit_interval(&rational(-1, 2)).is_err());
    }
}
