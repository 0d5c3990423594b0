//! Arbitrary-precision rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// `2^-k` as an exact rational.
pub fn dyadic(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Parses `"p/q"` or `"p"` (optional sign on `p`, `q > 0`) into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let malformed = || Error::MalformedRational(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (text, None),
    };
    let num: BigInt = parse_int(num, true).ok_or_else(malformed)?;
    let den: BigInt = match den {
        Some(q) => parse_int(q, false).ok_or_else(malformed)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

fn parse_int(text: &str, signed: bool) -> Option<BigInt> {
    let digits = match text.strip_prefix('-') {
        Some(rest) if signed => rest,
        Some(_) => return None,
        None => text.strip_prefix('+').filter(|_| signed).unwrap_or(text),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Always prints the reduced `"p/q"` form, including `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn format_point(p: &[Rational]) -> String {
    p.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

/// Parses a comma-separated coordinate list such as `"1/3,1/2"`.
pub fn parse_point(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(parse_rational).collect()
}

pub(crate) fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub(crate) fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Serde adapter for a single rational stored as a `"p/q"` string.
pub mod serde_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Serde adapter for a list of `"p/q"` strings.
pub mod serde_vec {
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(format_rational(&parse_rational("0").unwrap()), "0/1");
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
    }

    #[test]
    fn rejects_bad_text() {
        assert_eq!(
            parse_rational("1/0"),
            Err(Error::ZeroDenominator("1/0".into()))
        );
        for bad in ["", "/", "1/", "a/2", "1/-2", "1.5", "--1", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn dyadic_powers() {
        assert_eq!(dyadic(0), int(1));
        assert_eq!(dyadic(3), rat(1, 8));
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(p in any::<i64>(), q in 1..i64::MAX) {
            let r = rat(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
