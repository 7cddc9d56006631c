//! JSON encoding: integers travel as base-10 strings so arbitrary precision
//! survives the round trip.
//!
//! * polynomial: `["1", "-1", "-1"]`
//! * series: `{"lead": -2, "coeffs": ["1", "2"], "truncation": 2}`
//! * rational: `{"P": ["1"], "m": 0, "Q": ["1", "-1"]}`

use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::{IntPoly, IntSeries, LaurentSeries, NovikovRational};

/// One integer encoded as a decimal string. Bare JSON integers are accepted
/// on input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigIntStr(pub BigInt);

impl Serialize for BigIntStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BigIntStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = BigIntStr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a base-10 integer string")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<BigIntStr, E> {
                v.trim()
                    .parse::<BigInt>()
                    .map(BigIntStr)
                    .map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigIntStr, E> {
                Ok(BigIntStr(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigIntStr, E> {
                Ok(BigIntStr(v.into()))
            }
        }
        d.deserialize_any(V)
    }
}

/// `serde(with = ...)` adapter for `Vec<BigInt>`.
pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<BigIntStr>::deserialize(d)?
            .into_iter()
            .map(|b| b.0)
            .collect())
    }
}

/// `serde(with = ...)` adapter for integer matrices.
pub mod bigint_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            let row: Vec<String> = row.iter().map(ToString::to_string).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Vec<Vec<BigInt>>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of integer arrays")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(row) = seq.next_element::<Vec<BigIntStr>>()? {
                    out.push(row.into_iter().map(|b| b.0).collect());
                }
                Ok(out)
            }
        }
        d.deserialize_seq(V)
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        bigint_vec::serialize(self.coeffs(), s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(IntPoly::new(bigint_vec::deserialize(d)?))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    lead: i64,
    #[serde(with = "bigint_vec")]
    coeffs: Vec<BigInt>,
    truncation: usize,
}

impl Serialize for IntSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            lead: self.lead(),
            coeffs: self.coeffs().to_vec(),
            truncation: self.truncation(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SeriesRepr::deserialize(d)?;
        if r.truncation != r.coeffs.len() {
            return Err(de::Error::custom(format!(
                "truncation {} does not match {} coefficients",
                r.truncation,
                r.coeffs.len()
            )));
        }
        if r.coeffs.is_empty() {
            return Ok(LaurentSeries::zero(r.lead));
        }
        Ok(LaurentSeries::new(r.lead, r.coeffs))
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    #[serde(rename = "P")]
    p: IntPoly,
    m: i64,
    #[serde(rename = "Q")]
    q: IntPoly,
}

impl Serialize for NovikovRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            p: self.numerator().clone(),
            m: self.shift() as i64,
            q: self.denominator().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NovikovRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        NovikovRational::new(r.p, r.m, r.q).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip_is_bit_exact() {
        let text = r#"{"P":["1"],"m":2,"Q":["1","-2"]}"#;
        let r: NovikovRational = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), text);
    }

    #[test]
    fn series_round_trip_and_bignums() {
        let text = r#"{"lead":-1,"coeffs":["123456789012345678901234567890","-1"],"truncation":2}"#;
        let s: IntSeries = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), text);
    }

    #[test]
    fn numbers_are_accepted_on_input() {
        let r: NovikovRational = serde_json::from_str(r#"{"P":[1],"m":0,"Q":[1,-1,-1]}"#).unwrap();
        assert_eq!(r.denominator(), &IntPoly::from_i64s(&[1, -1, -1]));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(serde_json::from_str::<IntSeries>(r#"{"lead":0,"coeffs":["1"],"truncation":2}"#).is_err());
        assert!(serde_json::from_str::<NovikovRational>(r#"{"P":["1"],"m":0,"Q":["0","1"]}"#).is_err());
        assert!(serde_json::from_str::<IntPoly>(r#"["1.5"]"#).is_err());
    }
}
