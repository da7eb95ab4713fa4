//! Exact rational scalars and their `"p/q"` wire format.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for all combinatorial lengths and coordinates.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(num: i64) -> Q {
    BigRational::from(BigInt::from(num))
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Renders in lowest terms, `"p"` for integers and `"p/q"` with `q > 0` otherwise.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"`; rejects zero denominators.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n.trim(), d.trim()),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::parse(s, "bad numerator"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::parse(s, "bad denominator"))?;
    if d.is_zero() {
        return Err(Error::parse(s, "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Serde adapter serializing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(de)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Same adapter for `Vec<Q>`.
pub mod serde_q_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<Q>, D::Error> {
        let ss: Vec<String> = Vec::deserialize(de)?;
        ss.iter()
            .map(|s| parse_q(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/7", "-2/5", "4", "0", "10/4"] {
            let x = parse_q(s).unwrap();
            let y = parse_q(&format_q(&x)).unwrap();
            assert_eq!(x, y);
        }
        assert_eq!(format_q(&parse_q("10/4").unwrap()), "5/2");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_q("3/0").is_err());
    }
}
