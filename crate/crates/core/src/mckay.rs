//! The wild McKay correspondence for `S_n` acting on `A^{2n}` by two copies of
//! the permutation representation.
//!
//! `S_n`-étale algebras `M` correspond to degree `n` étale algebras
//! `M^{S_{n−1}}`, with the same automorphism group (the centralizer of the
//! component stabilizer). For this representation the weight `v(M)` equals
//! the discriminant exponent, and each `M` contributes `q^{2n−v(M)}/#C(H)`.
//! Summed over `M` this equals the point count of the Hilbert scheme of `n`
//! points in the plane, a crepant resolution of `A^{2n}/S_n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactq::rat;
use crate::localfields::{enumerate_tame_etale_algebras, EtaleAlgebra, LocalFieldError};
use crate::partitions::hilb_point_count;

#[derive(Debug, Error)]
pub enum McKayError {
    #[error("tame enumeration is incomplete for p = {p}, n = {n}: need p > n")]
    Incomplete { p: u64, n: usize },
    #[error(transparent)]
    LocalField(#[from] LocalFieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McKayWeights {
    pub algebra: EtaleAlgebra,
    pub v: u64,
    pub w: u64,
    /// codimension of the fixed locus of the inertia image on `V_k`
    pub fixed_codim: u64,
    pub centralizer_order: u64,
    pub ambient_dim: u64,
}

/// Weights of the `S_n`-étale algebra attached to `algebra`.
///
/// Over the maximal unramified extension a factor with invariants `(f, e)`
/// splits into `f` totally ramified components of degree `e`, so the inertia
/// image has `∑ f_i` orbits on the `n` coordinates and its fixed locus in
/// `A^{2n}` has codimension `2(n − ∑ f_i)`.
pub fn weights_for_algebra(algebra: &EtaleAlgebra) -> McKayWeights {
    let n = algebra.degree() as u64;
    let v = algebra.disc_exponent();
    let fixed_codim = 2 * (n - algebra.residue_degree_sum());
    McKayWeights {
        algebra: algebra.clone(),
        v,
        w: fixed_codim - v,
        fixed_codim,
        centralizer_order: algebra.aut_order(),
        ambient_dim: 2 * n,
    }
}

impl McKayWeights {
    /// `q^{2n − v}/#C(H)` at `q = p`.
    pub fn term(&self, p: u64) -> BigRational {
        let exp = self.ambient_dim - self.v;
        BigRational::new(
            BigInt::from(p).pow(exp as u32),
            BigInt::from(self.centralizer_order),
        )
    }

    /// `q^{w}/#C(H)` at `q = p`, the contribution over the origin.
    pub fn origin_term(&self, p: u64) -> BigRational {
        BigRational::new(BigInt::from(p).pow(self.w as u32), BigInt::from(self.centralizer_order))
    }
}

fn tame_weights(p: u64, n: usize) -> Result<Vec<McKayWeights>, McKayError> {
    let list = enumerate_tame_etale_algebras(p, n)?;
    if list.partial {
        return Err(McKayError::Incomplete { p, n });
    }
    Ok(list.algebras.iter().map(weights_for_algebra).collect())
}

fn sum_terms(terms: Vec<BigRational>) -> BigRational {
    terms
        .into_par_iter()
        .reduce(BigRational::zero, |a, b| a + b)
}

/// `∑_M p^{2n − v(M)}/#C(H)` over all `S_n`-étale algebras.
pub fn mckay_mass_side(p: u64, n: usize) -> Result<BigRational, McKayError> {
    let weights = tame_weights(p, n)?;
    Ok(sum_terms(weights.iter().map(|w| w.term(p)).collect()))
}

/// `∑_M p^{w(M)}/#C(H)`, the count over the origin.
pub fn mckay_origin_side(p: u64, n: usize) -> Result<BigRational, McKayError> {
    let weights = tame_weights(p, n)?;
    Ok(sum_terms(weights.iter().map(|w| w.origin_term(p)).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakdownRow {
    pub factors: String,
    pub d: u64,
    pub v: u64,
    pub w: u64,
    pub aut: u64,
    pub term_num: String,
    pub term_den: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McKayReport {
    pub p: u64,
    pub n: usize,
    pub passed: bool,
    pub mass_side: String,
    pub hilbert_side: String,
    pub hilbert_polynomial: String,
    pub rows: Vec<BreakdownRow>,
}

/// Checks `∑_M q^{2n−v(M)}/#C(H) = #Hilb^n(A^2)(F_q)` at `q = p`.
pub fn verify_wild_mckay(p: u64, n: usize) -> Result<McKayReport, McKayError> {
    let weights = tame_weights(p, n)?;
    let rows: Vec<BreakdownRow> = weights
        .iter()
        .map(|w| {
            let t = w.term(p);
            BreakdownRow {
                factors: w.algebra.to_string(),
                d: w.algebra.disc_exponent(),
                v: w.v,
                w: w.w,
                aut: w.centralizer_order,
                term_num: t.numer().to_string(),
                term_den: t.denom().to_string(),
            }
        })
        .collect();
    let mass = sum_terms(weights.iter().map(|w| w.term(p)).collect());
    let hilb = hilb_point_count(n);
    let hilb_value = hilb
        .eval_exact(&rat(p as i64))
        .expect("integral exponents at a positive point");
    Ok(McKayReport {
        p,
        n,
        passed: mass == hilb_value,
        mass_side: mass.to_string(),
        hilbert_side: hilb_value.to_string(),
        hilbert_polynomial: hilb.to_string(),
        rows,
    })
}
