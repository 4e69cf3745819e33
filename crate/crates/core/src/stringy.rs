//! Stringy point counts of log pairs with simple normal crossing boundary.
//!
//! For a regular `X` with boundary `D = ∑ a_h A_h + ∑ b_i B_i + ∑ c_j C_j`
//! (vertical components `A_h` along which `X` is smooth, vertical components
//! `B_i` along which it is not, horizontal components `C_j`), a `k`-point on
//! `A_h` and on exactly the `C_j` with `j ∈ J` contributes
//!
//! ```text
//! q^{a_h} · ∏_{j∈J} (q − 1)/(q^{1−c_j} − 1)
//! ```
//!
//! and the count is infinite as soon as a populated stratum meets a `C_j`
//! with `c_j ≥ 1`. Points on the `B_i` carry no `O_K`-points and are not
//! represented.
//!
//! The input is purely combinatorial. Whether the divisor actually has simple
//! normal crossings, including irreducibility of each component's completion
//! at every smooth `k`-point, is the caller's responsibility.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactq::{exponent_serde, exponent_vec_serde, Exponent, Extended, QExpr, QFrac};

pub type StringyValue = Extended;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringyError {
    #[error("vertical entry {entry}: malformed stratum {subset:?}: {reason}")]
    MalformedSubset {
        entry: usize,
        subset: Vec<usize>,
        reason: String,
    },
    #[error("declared total {declared} but strata sum to {actual}")]
    TotalMismatch { declared: u64, actual: u64 },
}

/// Number of `k`-points on `A_h° ∩ C_J°` (inside the chosen constructible set).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumCount {
    /// sorted 1-based indices into the horizontal divisor list
    pub subset: Vec<usize>,
    pub count: u64,
}

/// One vertical component; use `a = 0` for points on no vertical divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalEntry {
    #[serde(with = "exponent_serde")]
    pub a: Exponent,
    pub strata: Vec<StratumCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SncLogPairData {
    /// coefficients `c_j` of the horizontal components
    #[serde(with = "exponent_vec_serde")]
    pub horizontal: Vec<Exponent>,
    pub vertical: Vec<VerticalEntry>,
    /// `#(C ∩ X_sm)(k)` when known; checked against the strata
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<u64>,
}

impl SncLogPairData {
    pub fn validate(&self) -> Result<(), StringyError> {
        let n_div = self.horizontal.len();
        let mut sum = 0u64;
        for (h, entry) in self.vertical.iter().enumerate() {
            let mut seen: Vec<&[usize]> = Vec::new();
            for stratum in &entry.strata {
                let bad = |reason: &str| StringyError::MalformedSubset {
                    entry: h,
                    subset: stratum.subset.clone(),
                    reason: reason.to_string(),
                };
                if stratum.subset.iter().any(|&j| j == 0 || j > n_div) {
                    return Err(bad(&format!("indices must lie in 1..={n_div}")));
                }
                if stratum.subset.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad("indices must be strictly increasing"));
                }
                if seen.contains(&stratum.subset.as_slice()) {
                    return Err(bad("stratum listed twice"));
                }
                seen.push(&stratum.subset);
                sum += stratum.count;
            }
        }
        match self.total {
            Some(declared) if declared != sum => Err(StringyError::TotalMismatch {
                declared,
                actual: sum,
            }),
            _ => Ok(()),
        }
    }
}

/// `(q − 1)/(q^{1−c} − 1)`, or `None` when `c ≥ 1` (divergent).
///
/// This is `q · ∫_{m_K} |x|^{−c} dx`.
pub fn horizontal_factor(c: Exponent) -> Option<QFrac> {
    if c >= Exponent::one() {
        return None;
    }
    let one = QExpr::one();
    let num = QExpr::q() - one.clone();
    let den = QExpr::q_pow(Exponent::one() - c) - one;
    Some(QFrac::new(num, den).expect("q^{1-c} - 1 is nonzero for c < 1"))
}

/// Contribution of a single `k`-point: `q^a ∏_j (q − 1)/(q^{1−c_j} − 1)`.
pub fn stringy_point_contribution(a: Exponent, cs: &[Exponent]) -> StringyValue {
    let mut acc = QFrac::from(QExpr::q_pow(a));
    for &c in cs {
        match horizontal_factor(c) {
            Some(factor) => acc = &acc * &factor,
            None => return Extended::Infinite,
        }
    }
    Extended::Finite(acc)
}

/// `∑_h q^{a_h} ∑_J #(A_h° ∩ C_J°)(k) ∏_{j∈J} (q − 1)/(q^{1−c_j} − 1)`.
pub fn stringy_count_snc(data: &SncLogPairData) -> Result<StringyValue, StringyError> {
    data.validate()?;
    let factors: Vec<Option<QFrac>> = data.horizontal.iter().map(|&c| horizontal_factor(c)).collect();
    let mut total = QFrac::zero();
    for entry in &data.vertical {
        let mut inner = QFrac::zero();
        for stratum in entry.strata.iter().filter(|s| s.count > 0) {
            let mut term = QFrac::from(BigRational::from_integer(BigInt::from(stratum.count)));
            for &j in &stratum.subset {
                match &factors[j - 1] {
                    Some(f) => term = &term * f,
                    None => return Ok(Extended::Infinite),
                }
            }
            inner = &inner + &term;
        }
        total = &total + &(&inner * &QFrac::from(QExpr::q_pow(entry.a)));
    }
    Ok(Extended::Finite(total))
}
