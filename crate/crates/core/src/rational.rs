//! Exact rational helpers shared across the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Always `p/q`, including integers (`0/1`, `1/1`).
pub fn to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_string(r))
}

pub fn serialize_opt<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&to_string(r)),
        None => s.serialize_none(),
    }
}

pub fn serialize_vec<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(to_string))
}

pub fn serialize_matrix<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|row| row.iter().map(to_string).collect::<Vec<_>>()))
}

/// Parses `p/q`, an integer, a decimal (`0.125`, exact), or `a^b` with an
/// integer exponent (`2^-40`).
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse { line: 0, msg: format!("not a rational number: {s:?}") };
    if let Some((base, exp)) = s.split_once('^') {
        let base = parse(base)?;
        let exp: i32 = exp.trim().parse().map_err(|_| bad())?;
        if base.is_zero() && exp < 0 {
            return Err(bad());
        }
        return Ok(pow(&base, exp));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let mut r = Rational::new(numer, num_traits::pow(BigInt::from(10), frac.len()));
    r *= pow(&int(10), exponent);
    Ok(if negative { -r } else { r })
}

/// Whether `s` is written as a decimal (so only approximately meaningful).
pub fn is_decimal_literal(s: &str) -> bool {
    let s = s.trim();
    !s.contains('/') && !s.contains('^') && (s.contains('.') || s.contains(['e', 'E']))
}

pub fn pow(base: &Rational, exp: i32) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Nearest rational with denominator `denom` (ties away from zero).
pub fn round_to_denominator(x: f64, denom: u64) -> Rational {
    let scaled = (x * denom as f64).round();
    Rational::new(BigInt::from(scaled as i64), BigInt::from(denom))
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// `r · scale` as an integer; `scale` must be a multiple of the denominator.
pub fn scaled_numerator(r: &Rational, scale: &BigInt) -> BigInt {
    r.numer() * (scale / r.denom())
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse("-.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse("2^-3").unwrap(), ratio(1, 8));
        assert_eq!(parse("1e-2").unwrap(), ratio(1, 100));
        assert_eq!(parse("7").unwrap(), int(7));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn display_is_always_a_fraction() {
        assert_eq!(to_string(&int(0)), "0/1");
        assert_eq!(to_string(&ratio(2, 6)), "1/3");
    }

    #[test]
    fn rounding_to_grid() {
        assert_eq!(round_to_denominator(0.3, 10), ratio(3, 10));
        assert_eq!(from_f64(0.375).unwrap(), ratio(3, 8));
    }
}
