//! Exact rational helpers shared by the point-level models.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::fmt;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational {0:?}")]
pub struct ParseRationalError(pub String);

pub fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn in_unit(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| err())?;
            let b: BigInt = b.trim().parse().map_err(|_| err())?;
            if b.is_zero() {
                return Err(err());
            }
            Ok(Q::new(a, b))
        }
        None => {
            let a: BigInt = s.parse().map_err(|_| err())?;
            Ok(Q::from_integer(a))
        }
    }
}

/// Uniform rational in `[0,1]` with denominator `den`.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, den: i64) -> Q {
    q(rng.gen_range(0..=den), den)
}

/// Uniform rational in `(0,1)` with denominator `den` (requires `den >= 2`).
pub fn random_open_unit<R: Rng + ?Sized>(rng: &mut R, den: i64) -> Q {
    q(rng.gen_range(1..den), den)
}

/// Sorted sample of `n` rationals in `[0,1]`.
pub fn random_monotone<R: Rng + ?Sized>(rng: &mut R, n: usize, den: i64) -> Vec<Q> {
    let mut v: Vec<Q> = (0..n).map(|_| random_unit(rng, den)).collect();
    v.sort();
    v
}

pub struct Coords<'a>(pub &'a [Q]);

impl fmt::Display for Coords<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_q(x))?;
        }
        write!(f, ")")
    }
}

pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "3/4", "-2/3", "5"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_q(&parse_q("2/4").unwrap()), "1/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
