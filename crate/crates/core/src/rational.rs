//! Exact rational arithmetic helpers.
//!
//! Every density, weight and threshold in this crate is a [`Rational`]
//! (an arbitrary-precision fraction kept in canonical form: positive
//! denominator, gcd-reduced). No floating point enters the solver path;
//! floats appear only in display formatting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Build a rational from small integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse an exact rational from a decimal string (`"3"`, `"-1.25"`) or a
/// fraction string (`"3/2"`). Scientific notation is rejected: the input
/// formats guarantee exactness and floats never round-trip through here.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = |msg: &str| Error::InvalidParameter(format!("{msg}: {s:?}"));
    if s.is_empty() {
        return Err(err("empty number"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| err("bad fraction numerator"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| err("bad fraction denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(err("not a decimal number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err("bad digits"))?
    };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Rational::new(num * sign, den))
}

/// Exact `num/den` string, denominator always present (`"3/1"`).
pub fn format_exact(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering with 12 significant digits, for display only.
/// Computed from the exact representation, not through a float.
pub fn format_approx(r: &Rational) -> String {
    const SIG: i64 = 12;
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    // Decimal exponent of the leading digit: 10^e10 <= num/den < 10^(e10+1).
    let mut e10 = digits10(&num) as i64 - digits10(&den) as i64;
    let pow10 = |k: i64| -> BigInt { BigInt::from(10u32).pow(k.unsigned_abs() as u32) };
    // compare num/den against 10^e10
    let (lhs, rhs) = if e10 >= 0 {
        (num.clone(), &den * pow10(e10))
    } else {
        (&num * pow10(-e10), den.clone())
    };
    if lhs < rhs {
        e10 -= 1;
    }
    // mantissa = round(num/den * 10^(SIG-1-e10)), giving SIG digits
    let shift = SIG - 1 - e10;
    let (scaled_num, scaled_den) = if shift >= 0 {
        (&num * pow10(shift), den)
    } else {
        (num, &den * pow10(-shift))
    };
    let (q, rem) = scaled_num.div_rem(&scaled_den);
    let mut mantissa = if &rem * 2 >= scaled_den { q + 1 } else { q };
    // rounding can bump to the next power of ten
    if digits10(&mantissa) as i64 > SIG {
        mantissa /= 10;
        e10 += 1;
    }
    let digits = mantissa.to_string();
    let body = if e10 >= 0 && e10 < SIG {
        let split = (e10 + 1) as usize;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else if e10 < 0 && e10 >= -4 {
        format!("0.{}{}", "0".repeat((-e10 - 1) as usize), digits)
    } else {
        format!("{}.{}e{}", &digits[..1], &digits[1..], e10)
    };
    let body = body.trim_end_matches('0').trim_end_matches('.').to_string();
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn digits10(v: &BigInt) -> usize {
    v.abs().to_string().len()
}

/// Floor of a non-negative rational as a big integer.
pub fn floor_bigint(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// f64 approximation for logging and progress display only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("10/4").unwrap(), ratio(5, 2));
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_and_approx_formatting() {
        assert_eq!(format_exact(&int(3)), "3/1");
        assert_eq!(format_exact(&ratio(2, 3)), "2/3");
        assert_eq!(format_approx(&int(3)), "3");
        assert_eq!(format_approx(&ratio(2, 3)), "0.666666666667");
        assert_eq!(format_approx(&ratio(1, 8)), "0.125");
        assert_eq!(format_approx(&ratio(-1, 3)), "-0.333333333333");
        assert_eq!(format_approx(&int(0)), "0");
        assert_eq!(format_approx(&ratio(1, 100000)), "1e-5");
    }

    proptest! {
        // canonical form makes evaluation order invisible
        #[test]
        fn association_order_is_canonical(a in -50i64..50, b in 1i64..20,
                                          c in -50i64..50, d in 1i64..20,
                                          e in -50i64..50, f in 1i64..20) {
            let (x, y, z) = (ratio(a, b), ratio(c, d), ratio(e, f));
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            prop_assert_eq!((&x + &y) * &z, &x * &z + &y * &z);
        }

        #[test]
        fn decimal_parse_round_trips(num in 0i64..100000, scale in 0u32..5) {
            let den = 10i64.pow(scale);
            let s = format!("{}.{:0width$}", num / den, (num % den).abs(), width = scale as usize);
            let parsed = parse_rational(&s).unwrap();
            prop_assert_eq!(parsed, ratio(num, den));
        }
    }
}
