//! Truncated power series in `x` with [`QFrac`] coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactq::{rat, QFrac};

pub const DEFAULT_TRUNCATION: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("exp needs a series with zero constant term, found {0}")]
    NonzeroConstantTerm(String),
    #[error("log needs a series with constant term 1, found {0}")]
    ConstantTermNotOne(String),
}

/// `c_0 + c_1 x + … + c_N x^N + O(x^{N+1})`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<QFrac>,
}

impl TruncatedSeries {
    pub fn zero(truncation: usize) -> Self {
        Self {
            coeffs: vec![QFrac::zero(); truncation + 1],
        }
    }

    pub fn one(truncation: usize) -> Self {
        let mut s = Self::zero(truncation);
        s.coeffs[0] = QFrac::one();
        s
    }

    /// `x` itself (or zero when truncating at degree 0).
    pub fn x(truncation: usize) -> Self {
        let mut s = Self::zero(truncation);
        if truncation >= 1 {
            s.coeffs[1] = QFrac::one();
        }
        s
    }

    /// Pads with zeros or drops high coefficients to reach `truncation`.
    pub fn from_coeffs(mut coeffs: Vec<QFrac>, truncation: usize) -> Self {
        coeffs.resize(truncation + 1, QFrac::zero());
        Self { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &QFrac {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[QFrac] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, c: QFrac) {
        self.coeffs[n] = c;
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        Self::from_coeffs(self.coeffs[..=truncation.min(self.truncation())].to_vec(), truncation)
    }

    pub fn scale(&self, c: &QFrac) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `exp(self)` via `n·E_n = ∑_{k=1}^{n} k·s_k·E_{n−k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0].to_string()));
        }
        let n_max = self.truncation();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(QFrac::one());
        for n in 1..=n_max {
            let mut acc = QFrac::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() || out[n - k].is_zero() {
                    continue;
                }
                acc = acc + (&self.coeffs[k] * &out[n - k]).scale(&rat(k as i64));
            }
            out.push(acc.scale(&rat(n as i64).recip()));
        }
        Ok(Self { coeffs: out })
    }

    /// `log(self)` via `n·L_n = n·s_n − ∑_{k=1}^{n−1} k·L_k·s_{n−k}`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermNotOne(self.coeffs[0].to_string()));
        }
        let n_max = self.truncation();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(QFrac::zero());
        for n in 1..=n_max {
            let mut acc = self.coeffs[n].scale(&rat(n as i64));
            for k in 1..n {
                if out[k].is_zero() || self.coeffs[n - k].is_zero() {
                    continue;
                }
                acc = acc - (&out[k] * &self.coeffs[n - k]).scale(&rat(k as i64));
            }
            out.push(acc.scale(&rat(n as i64).recip()));
        }
        Ok(Self { coeffs: out })
    }
}

pub fn ts_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a * b
}

pub fn ts_exp(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    s.exp()
}

pub fn ts_log(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    s.log()
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.truncation().min(rhs.truncation());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let n = self.truncation().min(rhs.truncation());
        let mut coeffs = vec![QFrac::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(&self.coeffs[i] * &rhs.coeffs[j]);
            }
        }
        TruncatedSeries { coeffs }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "[{c}]*x")?,
                _ => write!(f, "[{c}]*x^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.truncation() + 1)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self})")
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<QFrac>::deserialize(d)?;
        if coeffs.is_empty() {
            return Err(serde::de::Error::custom("series needs at least one coefficient"));
        }
        Ok(Self { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{Exponent, QExpr};
    use num_rational::BigRational;

    fn r(n: i64, d: i64) -> QFrac {
        QFrac::from(BigRational::new(n.into(), d.into()))
    }

    fn poly(cs: &[i64], n: usize) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(cs.iter().map(|&c| QFrac::from(c)).collect(), n)
    }

    #[test]
    fn difference_of_squares() {
        let p = &poly(&[1, 1], 2) * &poly(&[1, -1], 2);
        assert_eq!(p, poly(&[1, 0, -1], 2));
    }

    #[test]
    fn multiplicative_identity_and_geometric_series() {
        let a = poly(&[3, 0, 5, -2], 4);
        assert_eq!(&a * &TruncatedSeries::one(4), a);
        let geo = poly(&[1, 1, 1, 1, 1], 4);
        assert_eq!(&geo * &poly(&[1, -1], 4), TruncatedSeries::one(4));
    }

    #[test]
    fn mixed_truncation_uses_the_minimum() {
        let p = &poly(&[1, 1, 1], 2) * &poly(&[1, 1, 1, 1, 1], 4);
        assert_eq!(p.truncation(), 2);
        assert_eq!(p, poly(&[1, 2, 3], 2));
    }

    #[test]
    fn exp_of_x() {
        let e = TruncatedSeries::x(4).exp().unwrap();
        let expected = TruncatedSeries::from_coeffs(vec![r(1, 1), r(1, 1), r(1, 2), r(1, 6), r(1, 24)], 4);
        assert_eq!(e, expected);
        assert_eq!(TruncatedSeries::zero(5).exp().unwrap(), TruncatedSeries::one(5));
        assert!(matches!(
            TruncatedSeries::one(3).exp(),
            Err(SeriesError::NonzeroConstantTerm(_))
        ));
    }

    #[test]
    fn exp_of_inner_mass_series_at_order_two() {
        // exp(x + (q^{-1} + 1/2) x^2), coefficient of x^2 is 1 + q^{-1}
        let qinv = QFrac::from(QExpr::q_pow(Exponent::from_integer(-1)));
        let s = TruncatedSeries::from_coeffs(vec![QFrac::zero(), QFrac::one(), &qinv + &r(1, 2)], 2);
        let e = s.exp().unwrap();
        assert_eq!(e.coeff(2), &(&QFrac::one() + &qinv));
    }

    #[test]
    fn log_mercator_and_inverse() {
        let l = poly(&[1, 1], 3).log().unwrap();
        assert_eq!(l, TruncatedSeries::from_coeffs(vec![r(0, 1), r(1, 1), r(-1, 2), r(1, 3)], 3));
        let x = TruncatedSeries::x(6);
        assert_eq!(x.exp().unwrap().log().unwrap(), x);
        assert!(matches!(
            poly(&[2, 1], 3).log(),
            Err(SeriesError::ConstantTermNotOne(_))
        ));
    }

    #[test]
    fn json_is_array_of_fractions() {
        let s = poly(&[1, 2], 1);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"[{"num":[[0,1,1,1]],"den":[[0,1,1,1]]},{"num":[[0,1,2,1]],"den":[[0,1,1,1]]}]"#);
        assert_eq!(serde_json::from_str::<TruncatedSeries>(&j).unwrap(), s);
    }
}
