//! Exact scalar helpers.
//!
//! All arithmetic in the crate runs over [`Rational`] (arbitrary precision
//! numerator and denominator) or [`BigInt`]. Rationals are written as
//! `"p/q"`, or just `"p"` when the denominator is one.

use std::str::FromStr;

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_big(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Formats a rational as `p/q`, or `p` for integers.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((_, den)) = s.split_once('/') {
        if den
            .trim()
            .parse::<BigInt>()
            .map(|d| d.is_zero())
            .unwrap_or(false)
        {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
    }
    Rational::from_str(s).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn is_nonnegative(v: &[Rational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

/// Serde adapters that write rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::Rational;
        use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&crate::rational::format(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| crate::rational::parse(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::Rational;
        use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                let strs: Vec<String> = row.iter().map(crate::rational::format).collect();
                seq.serialize_element(&strs)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Rational>>, D::Error> {
            let raw = Vec::<Vec<String>>::deserialize(d)?;
            raw.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| crate::rational::parse(s).map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

/// Serde adapter writing big integers as JSON numbers when they fit in
/// `i64`, and as decimal strings otherwise.
pub mod serde_bigint_matrix {
    use super::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Cell {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Cell>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| match v.to_i64() {
                        Some(x) => Cell::Small(x),
                        None => Cell::Big(v.to_string()),
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let rows = Vec::<Vec<Cell>>::deserialize(d)?;
        rows.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| match c {
                        Cell::Small(x) => Ok(BigInt::from(x)),
                        Cell::Big(s) => s.parse::<BigInt>().map_err(D::Error::custom),
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_print_without_denominator() {
        assert_eq!(format(&int(-7)), "-7");
        assert_eq!(
            format(&Rational::new(BigInt::from(6), BigInt::from(4))),
            "3/2"
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert_eq!(
            parse(" -3/9 ").unwrap(),
            Rational::new((-1).into(), 3.into())
        );
    }
}
