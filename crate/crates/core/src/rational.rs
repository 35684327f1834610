//! Exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn uint(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p/q"`, `"p"`, or `"-p/q"`. Zero denominators are rejected.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = denom.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

/// The fractional part `<r> = r - floor(r)`, always in `[0, 1)`.
pub fn fract(value: &Rational) -> Rational {
    value - value.floor()
}

pub fn is_integral(value: &Rational) -> bool {
    value.denom().is_one()
}

/// Converts a nonnegative integral rational to `u64`.
pub fn to_u64(value: &Rational) -> Option<u64> {
    if !is_integral(value) || value.is_negative() {
        return None;
    }
    u64::try_from(value.numer()).ok()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn dot(weights: &[Rational], values: &[Rational]) -> Rational {
    weights
        .iter()
        .zip(values)
        .fold(Rational::zero(), |acc, (w, x)| acc + w * x)
}

/// Serde adapter: rationals as `"p/q"` strings, accepting plain integers on input.
pub mod serde_text {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Rational;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(super::int(i)),
            Raw::Text(t) => super::parse(&t).map_err(|e| match e {
                crate::error::Error::Parse(msg) => de::Error::custom(msg),
                other => de::Error::custom(other),
            }),
        }
    }
}
