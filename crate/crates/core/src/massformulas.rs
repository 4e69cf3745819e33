//! Symbolic mass formulas over a local field with residue field of size `q`.
//!
//! * `N(K, n)`: mass of totally ramified extensions of degree `n`,
//!   `∑ q^{−d}/#Aut = q^{1−n}`.
//! * `M(K, n)`: mass of étale algebras of degree `n`,
//!   `∑_{i<n} P(n, n−i) q^{−i}`.
//!
//! Both are linked through the exponential formula
//!
//! ```text
//! ∑_n M(K,n) x^n = exp( ∑_n x^n ∑_{f|n} N(K_f, n/f) / f )
//! ```
//!
//! where `K_f` is the unramified extension of degree `f`, whose residue field
//! has `q^f` elements. An étale algebra is a multiset of fields, so its
//! groupoid mass is the exponential of the mass of fields; a field of degree
//! `n` with residue degree `f` is a totally ramified extension of `K_f` of
//! degree `n/f`, counted with weight `1/f` for the choice of embedding of
//! `K_f`. There is no additional `1/n` in the exponent: with it the degree 2
//! coefficient would be `3/4 + q^{−1}/2` instead of `1 + q^{−1}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::exactq::{rat, Exponent, QExpr, QFrac};
use crate::partitions::partition_count;
use crate::series::{SeriesError, TruncatedSeries};

/// Serre's mass over `K_f`: `q_f^{1−n}` with `q_f = q^f`.
pub fn serre_mass(n: usize, f: usize) -> QExpr {
    assert!(n >= 1 && f >= 1, "serre_mass needs n, f >= 1");
    QExpr::q_pow(Exponent::from_integer(f as i64 * (1 - n as i64)))
}

/// Bhargava's mass `∑_{i=0}^{n−1} P(n, n−i) q^{−i}`.
pub fn bhargava_mass(n: usize) -> QExpr {
    assert!(n >= 1, "bhargava_mass needs n >= 1");
    QExpr::from_terms((0..n).map(|i| {
        (
            Exponent::from_integer(-(i as i64)),
            BigRational::from_integer(BigInt::from(partition_count(n, n - i))),
        )
    }))
}

/// `1 + ∑_{n=1}^{n_max} M(K,n) x^n` with Bhargava's values.
pub fn bhargava_series(n_max: usize) -> TruncatedSeries {
    let mut coeffs = vec![QFrac::one()];
    coeffs.extend((1..=n_max).map(|n| QFrac::from(bhargava_mass(n))));
    TruncatedSeries::from_coeffs(coeffs, n_max)
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |f| n % f == 0)
}

/// `∑_{n=1}^{n_max} x^n ∑_{f|n} N(f, n/f)/f` for a given table of totally
/// ramified masses `N(f, m)`.
pub fn field_mass_series<F>(n_max: usize, mut n_of: F) -> TruncatedSeries
where
    F: FnMut(usize, usize) -> QFrac,
{
    let mut s = TruncatedSeries::zero(n_max);
    for n in 1..=n_max {
        let mut acc = QFrac::zero();
        for f in divisors(n) {
            acc = acc + n_of(f, n / f).scale(&rat(f as i64).recip());
        }
        s.set_coeff(n, acc);
    }
    s
}

/// `exp` of the field mass series built from Serre's formula.
pub fn mass_series_via_exp(n_max: usize) -> TruncatedSeries {
    assert!(n_max >= 1, "mass_series_via_exp needs n_max >= 1");
    field_mass_series(n_max, |f, m| serre_mass(m, f).into())
        .exp()
        .expect("field mass series has zero constant term")
}

/// How [`recover_n_from_m`] obtains `N(K_f, m)` for `f > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryMode {
    /// Treat `N(K_f, m)` as the same rational function of the residue
    /// cardinality as `N(K, m)`, evaluated at `q^f`; solve for all of them
    /// degree by degree.
    #[default]
    BaseChange,
    /// Take `N(K_f, m) = q^{f(1−m)}` for `f > 1` as given and solve only for
    /// `N(K, n)`.
    Consistency,
}

/// Masses recovered from an étale-algebra mass series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassTable {
    pub n_max: usize,
    /// `M(K, n)` for `0 ≤ n ≤ n_max`.
    pub m: Vec<QFrac>,
    /// `N(K_f, m)` keyed by `(f, m)` with `f·m ≤ n_max`.
    pub n: BTreeMap<(usize, usize), QFrac>,
}

impl MassTable {
    pub fn totally_ramified(&self, f: usize, m: usize) -> Option<&QFrac> {
        self.n.get(&(f, m))
    }
}

/// Inverts the exponential formula: `S = log(∑ M x^n)` and then
/// `N(K, n) = S_n − ∑_{f|n, f>1} N(K_f, n/f)/f`.
pub fn recover_n_from_m(m_series: &TruncatedSeries, mode: RecoveryMode) -> Result<MassTable, SeriesError> {
    let s = m_series.log()?;
    let n_max = s.truncation();
    // base[m] = N(K, m) as a function of q
    let mut base: Vec<QFrac> = vec![QFrac::zero(); n_max + 1];
    let mut table = BTreeMap::new();
    for n in 1..=n_max {
        let mut rest = s.coeff(n).clone();
        for f in divisors(n).filter(|&f| f > 1) {
            let m = n / f;
            let known = match mode {
                RecoveryMode::BaseChange => base[m].scale_exponents(f as i64),
                RecoveryMode::Consistency => QFrac::from(serre_mass(m, f)),
            };
            rest = rest - known.scale(&rat(f as i64).recip());
        }
        base[n] = rest;
    }
    for m in 1..=n_max {
        table.insert((1, m), base[m].clone());
        for f in 2..=(n_max / m) {
            let v = match mode {
                RecoveryMode::BaseChange => base[m].scale_exponents(f as i64),
                RecoveryMode::Consistency => QFrac::from(serre_mass(m, f)),
            };
            table.insert((f, m), v);
        }
    }
    Ok(MassTable {
        n_max,
        m: m_series.coeffs().to_vec(),
        n: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> QExpr {
        QExpr::q_pow(Exponent::from_integer(k))
    }

    #[test]
    fn serre_values() {
        assert!(serre_mass(1, 1).is_one());
        assert_eq!(serre_mass(2, 1), q(-1));
        assert_eq!(serre_mass(3, 2), q(-4));
    }

    #[test]
    fn bhargava_values() {
        assert_eq!(bhargava_mass(2), q(0) + q(-1));
        assert_eq!(bhargava_mass(3), q(0) + q(-1) + q(-2));
        assert_eq!(bhargava_mass(4), q(0) + q(-1) + q(-2).scale(&rat(2)) + q(-3));
    }

    #[test]
    fn exponential_formula_low_degrees() {
        let m = mass_series_via_exp(3);
        assert!(m.coeff(0).is_one());
        assert!(m.coeff(1).is_one());
        assert_eq!(m.coeff(2), &QFrac::from(q(0) + q(-1)));
        assert_eq!(m.coeff(3), &QFrac::from(q(0) + q(-1) + q(-2)));
    }

    #[test]
    fn extra_reciprocal_n_breaks_degree_two() {
        let inner = field_mass_series(2, |f, m| serre_mass(m, f).into());
        let mut divided = inner.clone();
        divided.set_coeff(2, inner.coeff(2).scale(&BigRational::new(1.into(), 2.into())));
        let c2 = divided.exp().unwrap().coeff(2).clone();
        let expected = QFrac::from(QExpr::constant(BigRational::new(3.into(), 4.into())) + q(-1).scale(&BigRational::new(1.into(), 2.into())));
        assert_eq!(c2, expected);
        assert_ne!(c2, QFrac::from(bhargava_mass(2)));
    }

    #[test]
    fn log_of_bhargava_series() {
        let s = bhargava_series(2).log().unwrap();
        let expected = QFrac::from(q(-1) + QExpr::constant(BigRational::new(1.into(), 2.into())));
        assert_eq!(s.coeff(2), &expected);
    }

    #[test]
    fn recovery_small_cases() {
        for mode in [RecoveryMode::BaseChange, RecoveryMode::Consistency] {
            let t = recover_n_from_m(&bhargava_series(4), mode).unwrap();
            assert!(t.totally_ramified(1, 1).unwrap().is_one());
            assert_eq!(t.totally_ramified(1, 2).unwrap(), &QFrac::from(q(-1)));
            assert_eq!(t.totally_ramified(1, 4).unwrap(), &QFrac::from(q(-3)));
            assert_eq!(t.totally_ramified(2, 2).unwrap(), &QFrac::from(q(-2)));
        }
        let mut bad = bhargava_series(3);
        bad.set_coeff(0, QFrac::from(2));
        assert!(recover_n_from_m(&bad, RecoveryMode::BaseChange).is_err());
    }

    #[test]
    fn hilbert_count_is_bhargava_times_q_to_2n() {
        for n in 1..=12 {
            let lhs = crate::partitions::hilb_point_count(n);
            let rhs = bhargava_mass(n).mul_q_pow(Exponent::from_integer(2 * n as i64));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }
}
