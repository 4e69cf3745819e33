//! JSON forms of [`QExpr`], [`QFrac`] and [`Extended`].
//!
//! An expression is a list of `[exp_num, exp_den, coeff_num, coeff_den]`
//! quadruples in ascending exponent order. Integers that do not fit in an
//! `i64` are written as decimal strings; both forms are accepted on input.
//! A fraction is `{"num": [...], "den": [...]}`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, Exponent, Extended, QExpr, QFrac};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Num(i64),
    Str(String),
}

impl IntRepr {
    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Num(v),
            None => IntRepr::Str(n.to_string()),
        }
    }

    fn to_bigint(&self) -> Result<BigInt, String> {
        match self {
            IntRepr::Num(v) => Ok(BigInt::from(*v)),
            IntRepr::Str(s) => BigInt::from_str(s.trim()).map_err(|e| format!("bad integer {s:?}: {e}")),
        }
    }
}

type Quad = [IntRepr; 4];

impl Serialize for QExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let quads: Vec<Quad> = self
            .terms()
            .map(|(e, c)| {
                [
                    IntRepr::Num(*e.numer()),
                    IntRepr::Num(*e.denom()),
                    IntRepr::from_bigint(c.numer()),
                    IntRepr::from_bigint(c.denom()),
                ]
            })
            .collect();
        quads.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let quads = Vec::<Quad>::deserialize(d)?;
        let mut terms = Vec::with_capacity(quads.len());
        for [en, ed, cn, cd] in &quads {
            let en = en.to_bigint().map_err(D::Error::custom)?;
            let ed = ed.to_bigint().map_err(D::Error::custom)?;
            let (Some(en), Some(ed)) = (en.to_i64(), ed.to_i64()) else {
                return Err(D::Error::custom("exponent out of range"));
            };
            if ed == 0 {
                return Err(D::Error::custom("zero exponent denominator"));
            }
            let cd = cd.to_bigint().map_err(D::Error::custom)?;
            if cd.is_zero() {
                return Err(D::Error::custom("zero coefficient denominator"));
            }
            let cn = cn.to_bigint().map_err(D::Error::custom)?;
            terms.push((Exponent::new(en, ed), BigRational::new(cn, cd)));
        }
        Ok(QExpr::from_terms(terms))
    }
}

#[derive(Serialize, Deserialize)]
struct FracRepr {
    num: QExpr,
    den: QExpr,
}

impl Serialize for QFrac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FracRepr {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QFrac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let FracRepr { num, den } = FracRepr::deserialize(d)?;
        QFrac::new(num, den).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ExtendedRepr {
    Finite { value: QFrac },
    Infinite,
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => ExtendedRepr::Finite { value: v.clone() },
            Extended::Infinite => ExtendedRepr::Infinite,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match ExtendedRepr::deserialize(d)? {
            ExtendedRepr::Finite { value } => Extended::Finite(value),
            ExtendedRepr::Infinite => Extended::Infinite,
        })
    }
}

/// Parses `"3"`, `"-1/2"` and similar into an exponent.
pub fn parse_exponent(s: &str) -> Result<Exponent, ExactError> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| ExactError::Parse(format!("bad rational {s:?}")))?;
    let d: i64 = d.parse().map_err(|_| ExactError::Parse(format!("bad rational {s:?}")))?;
    if d == 0 {
        return Err(ExactError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Exponent::new(n, d))
}

pub fn parse_bigrational(s: &str) -> Result<BigRational, ExactError> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| ExactError::Parse(format!("bad rational {s:?}")))?;
    let d = BigInt::from_str(d).map_err(|_| ExactError::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(ExactError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Serde adapter for small rationals written as `"a/b"` strings or integers.
pub mod exponent_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(e: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        if e.is_integer() {
            s.serialize_i64(*e.numer())
        } else {
            s.serialize_str(&format!("{}/{}", e.numer(), e.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(Exponent::from_integer(v)),
            Repr::Str(s) => parse_exponent(&s).map_err(D::Error::custom),
        }
    }
}

/// [`exponent_serde`] for sequences.
pub mod exponent_vec_serde {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Wrapped(#[serde(with = "super::exponent_serde")] Exponent);

    pub fn serialize<S: Serializer>(v: &[Exponent], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|e| Wrapped(*e)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Exponent>, D::Error> {
        Ok(Vec::<Wrapped>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}
