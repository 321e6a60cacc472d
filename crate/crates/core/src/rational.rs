//! Exact rational scalars and their `"num/den"` text form.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

pub fn int(v: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or a bare integer `"num"`.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let bad = || Error::InvalidRational(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Always renders as `"num/den"`, including integers (`"3/1"`).
pub fn format_rational(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &ExactRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fallback for magnitudes the primitive conversion rejects.
        let (n, d) = (r.numer(), r.denom());
        let shift = n.bits().max(d.bits()).saturating_sub(900);
        let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<ExactRational> {
    BigRational::from_float(x)
}

pub fn max_abs(values: impl IntoIterator<Item = ExactRational>) -> ExactRational {
    values
        .into_iter()
        .map(|v| v.abs())
        .fold(ExactRational::zero(), |a, b| if b > a { b } else { a })
}

/// `e^{-1/sqrt(k)}` as a fixed-point integer scaled by `2^bits`, accurate to a
/// few units in the last place.
fn exp_neg_inv_sqrt_fixed(k: u64, bits: u64) -> BigInt {
    let one = BigInt::one() << bits;
    // sqrt(k) * 2^bits
    let sqrt_k = (BigUint::from(k) << (2 * bits)).sqrt();
    // s = 2^bits / sqrt(k), in fixed point
    let s: BigInt = (BigInt::one() << (2 * bits)) / BigInt::from(sqrt_k);
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut j: u64 = 1;
    loop {
        term = -((&term * &s) >> bits) / BigInt::from(j);
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    sum
}

/// Best rational approximation of `e^{-1/sqrt(k)}` (continued-fraction
/// convergent) with relative error below `2^-rel_bits`.
pub fn exp_neg_inv_sqrt(k: u64, rel_bits: u32) -> ExactRational {
    let work = u64::from(rel_bits) * 2 + 64;
    let fixed = exp_neg_inv_sqrt_fixed(k, work);
    let target = BigRational::new(fixed, BigInt::one() << work);
    let tol = &target / BigRational::from_integer(BigInt::one() << rel_bits);
    closest_convergent(&target, &tol)
}

/// First continued-fraction convergent of `x` (> 0) within `tol` of it.
pub fn closest_convergent(x: &ExactRational, tol: &ExactRational) -> ExactRational {
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    loop {
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let c = BigRational::new(h.clone(), k.clone());
        if (&c - x).abs() < *tol || r.is_zero() {
            return c;
        }
        num = std::mem::replace(&mut den, r);
    }
}

/// Least common multiple of the denominators.
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a ExactRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn gcd_of_numerators<'a>(values: impl IntoIterator<Item = &'a ExactRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v.numer()))
}

pub fn is_positive(r: &ExactRational) -> bool {
    r.numer().sign() == Sign::Plus
}

pub(crate) mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &ExactRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod serde_str_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[ExactRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ExactRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/-4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&ratio(-2, 4)), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn xi_relative_error() {
        for k in [2u64, 4, 9, 16, 25, 100] {
            let xi = exp_neg_inv_sqrt(k, 64);
            let f = (-1.0 / (k as f64).sqrt()).exp();
            assert!((to_f64(&xi) - f).abs() < 1e-15, "k = {k}");
            // Cross-check against a much finer fixed-point value.
            let fine = BigRational::new(exp_neg_inv_sqrt_fixed(k, 400), BigInt::one() << 400u32);
            let rel = ((&xi - &fine) / &fine).abs();
            assert!(rel < BigRational::new(BigInt::one(), BigInt::one() << 64u32));
            // Convergents keep the representation small.
            assert!(xi.denom().bits() < 48, "k = {k}: {} bits", xi.denom().bits());
        }
    }

    #[test]
    fn to_f64_huge() {
        let big = BigRational::new(BigInt::one() << 5000u32, (BigInt::one() << 5000u32) * 3);
        assert!((to_f64(&big) - 1.0 / 3.0).abs() < 1e-15);
    }
}
