//! Rational scalars and their string form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonical string: `"p"` for integers, `"p/q"` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn denom_i64(r: &Rational) -> i64 {
    r.denom().to_i64().expect("denominator fits in i64")
}

pub fn to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn lcm_i64(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

pub fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("floor fits in i64")
}

pub fn ceil_i64(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("ceil fits in i64")
}

pub fn is_unit_sign(r: &Rational) -> bool {
    r.is_integer() && r.numer().abs().is_one()
}

pub mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(|_| serde::de::Error::custom(format!("not a rational: {s:?}")))
    }
}

pub mod serde_rational_vec {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(fmt_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).map_err(|_| serde::de::Error::custom(format!("not a rational: {s:?}"))))
            .collect()
    }
}

pub mod serde_rational_mat {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|row| row.iter().map(fmt_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).map_err(|_| serde::de::Error::custom(format!("not a rational: {s:?}"))))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7/4", "1/60", "-3/40"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(fmt_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn floor_ceil_negative() {
        assert_eq!(floor_i64(&rat(-3, 2)), -2);
        assert_eq!(ceil_i64(&rat(-3, 2)), -1);
        assert!(is_unit_sign(&int(-1)));
        assert!(!is_unit_sign(&rat(1, 2)));
    }
}
