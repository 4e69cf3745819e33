//! Brute-force p-adic measures over residue rings `Z/p^m`.
//!
//! The measure of the `Z_p`-points of an affine scheme of dimension `d` is the
//! limit of `#X(Z/p^m)/p^{m·d}`. For smooth `X` the sequence is constant from
//! `m = 1` on (`#X(Z/p^{m+1}) = p^d·#X(Z/p^m)`), giving `#X(F_p)/p^d`. For the
//! zero set of a nowhere locally constant function the fraction
//! `#X(Z/p^m)/p^{m·n}` tends to zero.
//!
//! Two exact counting strategies are available. [`CountStrategy::BruteForce`]
//! walks all of `(Z/p^m)^n`. [`CountStrategy::Lift`] walks the solutions mod
//! `p^j` and tries every lift mod `p^{j+1}`; every solution mod `p^{j+1}`
//! reduces to a solution mod `p^j`, so the count is the same, at a cost of
//! `p^n` times the number of solutions one level down.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactq::{Exponent, Extended, QExpr, QFrac};
use crate::stringy::horizontal_factor;
use crate::util::{is_prime, pow_mod};

/// Default cap on the number of candidate points examined.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("invalid polynomial system: {0}")]
    Invalid(String),
    #[error("enumeration needs {required} evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("modulus {p}^{m} is too large")]
    ModulusTooLarge { p: u64, m: u32 },
    #[error("Jacobian has rank {rank} < {needed} at the mod-p point {point:?}")]
    NotSmooth {
        point: Vec<u64>,
        rank: usize,
        needed: usize,
    },
    #[error("Hensel relation fails at m = {m}: expected {expected}, counted {found}")]
    HenselMismatch { m: u32, expected: u128, found: u128 },
}

/// Integer polynomial as a list of `(exponent vector, coefficient)` terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    pub terms: Vec<(Vec<u32>, i64)>,
}

impl Polynomial {
    pub fn new(terms: Vec<(Vec<u32>, i64)>) -> Self {
        Self { terms }
    }

    fn eval_mod(&self, point: &[u64], modulus: u64) -> u64 {
        let m = modulus as u128;
        let mut acc = 0u128;
        for (exps, c) in &self.terms {
            let mut t = (*c as i128).rem_euclid(modulus as i128) as u128;
            for (x, &a) in point.iter().zip(exps) {
                if a > 0 {
                    t = t * pow_mod(*x, a as u64, modulus) as u128 % m;
                }
            }
            acc = (acc + t) % m;
        }
        acc as u64
    }

    fn derivative(&self, var: usize) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(e, c)| e[var] > 0 && *c != 0)
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[var] -= 1;
                    (e2, c * e[var] as i64)
                })
                .collect(),
        }
    }
}

/// Equations for an affine scheme over `Z_p` with known relative dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySystem {
    pub p: u64,
    /// number of variables
    pub n: usize,
    /// expected dimension, used for normalization
    pub d: usize,
    pub polys: Vec<Polynomial>,
}

impl PolySystem {
    pub fn new(p: u64, n: usize, d: usize, polys: Vec<Polynomial>) -> Result<Self, PadicError> {
        let sys = Self { p, n, d, polys };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<(), PadicError> {
        if !is_prime(self.p) {
            return Err(PadicError::Invalid(format!("p = {} is not prime", self.p)));
        }
        if self.d > self.n {
            return Err(PadicError::Invalid(format!("d = {} exceeds n = {}", self.d, self.n)));
        }
        for (i, f) in self.polys.iter().enumerate() {
            if f.terms.is_empty() {
                return Err(PadicError::Invalid(format!("polynomial {i} has no terms")));
            }
            if let Some((e, _)) = f.terms.iter().find(|(e, _)| e.len() != self.n) {
                return Err(PadicError::Invalid(format!(
                    "polynomial {i} has exponent vector {e:?} of length {} (expected {})",
                    e.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    fn is_solution(&self, point: &[u64], modulus: u64) -> bool {
        self.polys.iter().all(|f| f.eval_mod(point, modulus) == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountStrategy {
    BruteForce,
    #[default]
    Lift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub budget: u64,
    pub strategy: CountStrategy,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            strategy: CountStrategy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueCount {
    pub m: u32,
    pub count: u128,
    /// `count / p^{m·d}`
    #[serde(serialize_with = "ser_rational")]
    pub normalized: BigRational,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn modulus(p: u64, m: u32) -> Result<u64, PadicError> {
    // keep products of two residues inside u128 comfortably
    p.checked_pow(m)
        .filter(|&v| v < (1u64 << 62))
        .ok_or(PadicError::ModulusTooLarge { p, m })
}

fn pow_u128(base: u64, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Calls `visit` on every point of `(Z/modulus)^n` with the first coordinate
/// fixed to `first`.
fn for_each_with_first(n: usize, modulus: u64, first: u64, mut visit: impl FnMut(&[u64])) {
    let mut point = vec![0u64; n];
    point[0] = first;
    loop {
        visit(&point);
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            point[i] += 1;
            if point[i] < modulus {
                break;
            }
            point[i] = 0;
            i -= 1;
        }
    }
}

fn brute_force_solutions(sys: &PolySystem, modulus: u64, collect: bool) -> (u128, Vec<u64>) {
    if sys.n == 0 {
        let ok = sys.is_solution(&[], modulus);
        return (ok as u128, Vec::new());
    }
    let per_first: Vec<(u128, Vec<u64>)> = (0..modulus)
        .into_par_iter()
        .map(|first| {
            let mut count = 0u128;
            let mut pts = Vec::new();
            for_each_with_first(sys.n, modulus, first, |pt| {
                if sys.is_solution(pt, modulus) {
                    count += 1;
                    if collect {
                        pts.extend_from_slice(pt);
                    }
                }
            });
            (count, pts)
        })
        .collect();
    let count = per_first.iter().map(|(c, _)| c).sum();
    let pts = if collect {
        per_first.into_iter().flat_map(|(_, v)| v).collect()
    } else {
        Vec::new()
    };
    (count, pts)
}

/// Solutions mod `p^{level+1}` lying over the given solutions mod `p^level`.
fn lift_level(sys: &PolySystem, sols: &[u64], level: u32, collect: bool) -> Result<(u128, Vec<u64>), PadicError> {
    let n = sys.n;
    let step = modulus(sys.p, level)?;
    let next = modulus(sys.p, level + 1)?;
    let p = sys.p;
    let chunk: Vec<(u128, Vec<u64>)> = sols
        .par_chunks(n.max(1))
        .map(|base| {
            let mut count = 0u128;
            let mut pts = Vec::new();
            let mut digits = vec![0u64; n];
            let mut point = vec![0u64; n];
            loop {
                for i in 0..n {
                    point[i] = base[i] + step * digits[i];
                }
                if sys.is_solution(&point, next) {
                    count += 1;
                    if collect {
                        pts.extend_from_slice(&point);
                    }
                }
                let mut i = 0;
                loop {
                    if i == n {
                        return (count, pts);
                    }
                    digits[i] += 1;
                    if digits[i] < p {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
            }
        })
        .collect();
    let count = chunk.iter().map(|(c, _)| c).sum();
    let pts = if collect {
        chunk.into_iter().flat_map(|(_, v)| v).collect()
    } else {
        Vec::new()
    };
    Ok((count, pts))
}

/// Counts of `#X(Z/p^j)` for `j = 1..=m_max`.
pub fn count_levels(sys: &PolySystem, m_max: u32, opts: &CountOptions) -> Result<Vec<u128>, PadicError> {
    sys.validate()?;
    if m_max == 0 {
        return Err(PadicError::Invalid("modulus exponent must be at least 1".into()));
    }
    match opts.strategy {
        CountStrategy::BruteForce => (1..=m_max)
            .map(|m| {
                let md = modulus(sys.p, m)?;
                let required = pow_u128(md, sys.n);
                if required > opts.budget as u128 {
                    return Err(PadicError::BudgetExceeded {
                        required,
                        budget: opts.budget,
                    });
                }
                Ok(brute_force_solutions(sys, md, false).0)
            })
            .collect(),
        CountStrategy::Lift => {
            let base_work = pow_u128(sys.p, sys.n);
            let mut spent = base_work;
            if spent > opts.budget as u128 {
                return Err(PadicError::BudgetExceeded {
                    required: spent,
                    budget: opts.budget,
                });
            }
            modulus(sys.p, m_max)?;
            let (c1, mut sols) = brute_force_solutions(sys, sys.p, m_max > 1);
            let mut counts = vec![c1];
            for level in 1..m_max {
                let prev = *counts.last().expect("at least one level");
                spent += prev * base_work;
                if spent > opts.budget as u128 {
                    return Err(PadicError::BudgetExceeded {
                        required: spent,
                        budget: opts.budget,
                    });
                }
                let collect = level + 1 < m_max;
                let (c, next) = if sys.n == 0 {
                    (prev, Vec::new())
                } else {
                    lift_level(sys, &sols, level, collect)?
                };
                counts.push(c);
                sols = next;
            }
            Ok(counts)
        }
    }
}

fn normalized(count: u128, p: u64, exp: usize) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(p).pow(exp as u32))
}

/// `#X(Z/p^m)` together with `count / p^{m·d}`.
pub fn count_points_mod(sys: &PolySystem, m: u32, opts: &CountOptions) -> Result<ResidueCount, PadicError> {
    let counts = count_levels(sys, m, opts)?;
    let count = *counts.last().expect("m >= 1");
    Ok(ResidueCount {
        m,
        count,
        normalized: normalized(count, sys.p, m as usize * sys.d),
    })
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col] * inv % p;
                for c in col..cols {
                    let sub = factor * rows[rank][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothMeasureReport {
    pub p: u64,
    pub d: usize,
    pub levels: Vec<ResidueCount>,
    /// `#X(F_p)/p^d`
    #[serde(serialize_with = "ser_rational")]
    pub measure: BigRational,
}

/// Checks that `X` is smooth of dimension `d` at every `F_p`-point and that
/// `#X(Z/p^{m+1}) = p^d · #X(Z/p^m)` for `1 ≤ m < m_max`.
pub fn smooth_measure_check(sys: &PolySystem, m_max: u32, opts: &CountOptions) -> Result<SmoothMeasureReport, PadicError> {
    sys.validate()?;
    if pow_u128(sys.p, sys.n) > opts.budget as u128 {
        return Err(PadicError::BudgetExceeded {
            required: pow_u128(sys.p, sys.n),
            budget: opts.budget,
        });
    }
    let needed = sys.n - sys.d;
    let jacobian: Vec<Vec<Polynomial>> = sys
        .polys
        .iter()
        .map(|f| (0..sys.n).map(|i| f.derivative(i)).collect())
        .collect();
    let (_, pts) = brute_force_solutions(sys, sys.p, true);
    for pt in pts.chunks(sys.n.max(1)) {
        let pt = if sys.n == 0 { &[][..] } else { pt };
        let rows: Vec<Vec<u64>> = jacobian
            .iter()
            .map(|row| row.iter().map(|g| g.eval_mod(pt, sys.p)).collect())
            .collect();
        let rank = rank_mod_p(rows, sys.p);
        if rank < needed {
            return Err(PadicError::NotSmooth {
                point: pt.to_vec(),
                rank,
                needed,
            });
        }
    }
    let counts = count_levels(sys, m_max, opts)?;
    let scale = pow_u128(sys.p, sys.d);
    for (i, pair) in counts.windows(2).enumerate() {
        let expected = pair[0] * scale;
        if pair[1] != expected {
            return Err(PadicError::HenselMismatch {
                m: i as u32 + 2,
                expected,
                found: pair[1],
            });
        }
    }
    let levels = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| ResidueCount {
            m: i as u32 + 1,
            count,
            normalized: normalized(count, sys.p, (i + 1) * sys.d),
        })
        .collect();
    Ok(SmoothMeasureReport {
        p: sys.p,
        d: sys.d,
        levels,
        measure: normalized(counts[0], sys.p, sys.d),
    })
}

/// `#X(Z/p^m) / p^{m·n}`, normalized by the ambient dimension.
pub fn null_set_fraction(sys: &PolySystem, m: u32, opts: &CountOptions) -> Result<BigRational, PadicError> {
    let c = count_points_mod(sys, m, opts)?;
    Ok(normalized(c.count, sys.p, m as usize * sys.n))
}

/// Null-set fractions for `m = 1, 2, …` up to `m_cap` or until the budget
/// runs out, whichever comes first.
pub fn null_set_profile(sys: &PolySystem, m_cap: u32, opts: &CountOptions) -> Result<Vec<(u32, BigRational)>, PadicError> {
    let mut out = Vec::new();
    for m in 1..=m_cap {
        let counts = match count_levels(sys, m, opts) {
            Ok(c) => c,
            Err(PadicError::BudgetExceeded { .. }) | Err(PadicError::ModulusTooLarge { .. }) if m > 1 => break,
            Err(e) => return Err(e),
        };
        out.push((m, normalized(*counts.last().expect("m >= 1"), sys.p, m as usize * sys.n)));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialIntegral {
    /// `∑_{i=1}^{terms} p^{ic}(p^{−i} − p^{−i−1})`
    pub partial: f64,
    /// `q^{−1}(q − 1)/(q^{1−c} − 1)` for `c < 1`
    pub exact: Extended,
}

/// `∫_{m_K} |x|^{−c} dx`, as a partial sum over valuation shells and in
/// closed form.
pub fn monomial_integral(c: Exponent, p: u64, terms: u32) -> MonomialIntegral {
    assert!(terms >= 1, "need at least one shell");
    let pf = p as f64;
    let cf = *c.numer() as f64 / *c.denom() as f64;
    let partial = (1..=terms)
        .map(|i| {
            let i = i as f64;
            pf.powf(i * cf) * (pf.powf(-i) - pf.powf(-i - 1.0))
        })
        .sum();
    let exact = match horizontal_factor(c) {
        Some(f) => Extended::Finite(&QFrac::from(QExpr::q_pow(Exponent::from_integer(-1))) * &f),
        None => Extended::Infinite,
    };
    MonomialIntegral { partial, exact }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn poly(terms: &[(&[u32], i64)]) -> Polynomial {
        Polynomial::new(terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect())
    }

    fn circle(p: u64) -> PolySystem {
        PolySystem::new(p, 2, 1, vec![poly(&[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -1)])]).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn circle_counts() {
        let opts = CountOptions::default();
        let c1 = count_points_mod(&circle(5), 1, &opts).unwrap();
        assert_eq!((c1.count, c1.normalized.clone()), (4, r(4, 5)));
        let c2 = count_points_mod(&circle(5), 2, &opts).unwrap();
        assert_eq!((c2.count, c2.normalized), (20, r(4, 5)));
    }

    #[test]
    fn empty_system_is_whole_space() {
        let sys = PolySystem::new(5, 1, 1, vec![]).unwrap();
        let c = count_points_mod(&sys, 2, &CountOptions::default()).unwrap();
        assert_eq!((c.count, c.normalized), (25, r(1, 1)));
    }

    #[test]
    fn strategies_agree() {
        let cusp = PolySystem::new(5, 2, 1, vec![poly(&[(&[2, 0], 1), (&[0, 3], -1)])]).unwrap();
        for sys in [circle(5), circle(3), cusp] {
            for m in 1..=3 {
                let brute = CountOptions {
                    strategy: CountStrategy::BruteForce,
                    ..Default::default()
                };
                let a = count_points_mod(&sys, m, &brute).unwrap();
                let b = count_points_mod(&sys, m, &CountOptions::default()).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let opts = CountOptions {
            budget: 100,
            strategy: CountStrategy::BruteForce,
        };
        assert_eq!(
            count_points_mod(&circle(5), 2, &opts),
            Err(PadicError::BudgetExceeded {
                required: 625,
                budget: 100
            })
        );
    }

    #[test]
    fn smooth_circle_measure() {
        let rep = smooth_measure_check(&circle(5), 3, &CountOptions::default()).unwrap();
        assert_eq!(rep.measure, r(4, 5));
        assert_eq!(rep.levels.iter().map(|l| l.count).collect::<Vec<_>>(), vec![4, 20, 100]);
    }

    #[test]
    fn coordinate_line() {
        let sys = PolySystem::new(3, 2, 1, vec![poly(&[(&[1, 0], 1)])]).unwrap();
        let rep = smooth_measure_check(&sys, 3, &CountOptions::default()).unwrap();
        assert_eq!(rep.measure, r(1, 1));
        assert!(rep.levels.iter().all(|l| l.normalized == r(1, 1)));
    }

    #[test]
    fn node_is_not_smooth() {
        let sys = PolySystem::new(5, 2, 1, vec![poly(&[(&[1, 1], 1)])]).unwrap();
        match smooth_measure_check(&sys, 2, &CountOptions::default()) {
            Err(PadicError::NotSmooth { point, rank, needed }) => {
                assert_eq!(point, vec![0, 0]);
                assert_eq!((rank, needed), (0, 1));
            }
            other => panic!("expected smoothness failure, got {other:?}"),
        }
    }

    #[test]
    fn cusp_null_set() {
        let sys = PolySystem::new(5, 2, 1, vec![poly(&[(&[2, 0], 1), (&[0, 3], -1)])]).unwrap();
        let opts = CountOptions::default();
        assert_eq!(null_set_fraction(&sys, 1, &opts).unwrap(), r(1, 5));
        assert!(null_set_fraction(&sys, 3, &opts).unwrap() < r(1, 5));
    }

    #[test]
    fn unit_constant_has_no_zeros() {
        let sys = PolySystem::new(7, 2, 1, vec![poly(&[(&[0, 0], 1)])]).unwrap();
        for m in 1..=3 {
            assert!(null_set_fraction(&sys, m, &CountOptions::default()).unwrap().is_zero());
        }
    }

    #[test]
    fn invalid_systems() {
        assert!(PolySystem::new(6, 1, 1, vec![]).is_err());
        assert!(PolySystem::new(5, 1, 2, vec![]).is_err());
        assert!(PolySystem::new(5, 2, 1, vec![Polynomial::new(vec![])]).is_err());
        assert!(PolySystem::new(5, 2, 1, vec![poly(&[(&[1], 1)])]).is_err());
    }

    #[test]
    fn monomial_integrals() {
        let zero = monomial_integral(Exponent::from_integer(0), 5, 40);
        assert_eq!(zero.exact, Extended::Finite(QFrac::from(QExpr::q_pow(Exponent::from_integer(-1)))));
        assert!((zero.partial - 0.2).abs() < 1e-12);
        let half = monomial_integral(Exponent::new(1, 2), 5, 60);
        let expected = QFrac::from((QExpr::one() + QExpr::q_pow(Exponent::new(1, 2))).mul_q_pow(Exponent::from_integer(-1)));
        assert_eq!(half.exact, Extended::Finite(expected));
        assert!((half.partial - 0.647_213_595_5).abs() < 1e-9);
        assert!(monomial_integral(Exponent::from_integer(1), 5, 10).exact.is_infinite());
    }

    #[test]
    fn json_schema() {
        let sys: PolySystem =
            serde_json::from_str(r#"{"p":5,"n":2,"d":1,"polys":[[[[2,0],1],[[0,2],1],[[0,0],-1]]]}"#).unwrap();
        assert_eq!(sys, circle(5));
    }
}

#[cfg(test)]
mod decay_tests {
    use super::*;

    #[test]
    fn null_set_profiles_decrease() {
        let opts = CountOptions {
            budget: 2_000_000,
            ..Default::default()
        };
        for terms in [vec![(vec![2u32, 0], 1i64), (vec![0, 3], -1)], vec![(vec![1, 1], 1)]] {
            let sys = PolySystem::new(5, 2, 1, vec![Polynomial::new(terms)]).unwrap();
            let prof = null_set_profile(&sys, 12, &opts).unwrap();
            assert!(prof.len() >= 4);
            assert!(prof.windows(2).all(|w| w[1].1 <= w[0].1));
        }
    }

    #[test]
    fn partial_sums_increase_towards_exact() {
        for c in [Exponent::from_integer(0), Exponent::new(1, 2), Exponent::new(-1, 1)] {
            let exact = monomial_integral(c, 5, 1).exact.finite().unwrap().eval_real(5.0).unwrap();
            let mut last = 0.0;
            for terms in 1..30 {
                let partial = monomial_integral(c, 5, terms).partial;
                assert!(partial >= last && partial <= exact + 1e-12);
                last = partial;
            }
        }
    }
}
