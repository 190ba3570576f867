//! Exact rational scalars and their `"p/q"` wire format.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `"p"` or `"p/q"` in lowest terms, `q > 0`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"`. Whitespace is not accepted; the denominator must
/// be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let mk = |v: &str| BigInt::from_str(v).map_err(|_| RatParseError(s.to_string()));
    match s.split_once('/') {
        None => Ok(Rat::from_integer(mk(s)?)),
        Some((p, q)) => {
            let (p, q) = (mk(p)?, mk(q)?);
            if q.is_zero() {
                return Err(RatParseError(s.to_string()));
            }
            Ok(Rat::new(p, q))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct RatParseError(pub String);

/// Returns `f` as an `i64` if it is an integer that fits, used by the scan
/// kernels that run on machine integers.
pub fn as_i64(r: &Rat) -> Option<i64> {
    if !r.denom().is_one() {
        return None;
    }
    i64::try_from(r.numer().clone()).ok()
}

/// `max_i |v_i|` over a nonempty slice; zero for an empty one.
pub fn max_abs(values: &[Rat]) -> Rat {
    let mut best = Rat::zero();
    for v in values {
        let a = v.abs();
        if a > best {
            best = a;
        }
    }
    best
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod serde_rat {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Rat>`.
pub mod serde_rat_vec {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter().map(|s| parse_rat(s).map_err(D::Error::custom)).collect()
    }
}
