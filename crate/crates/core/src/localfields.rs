//! Tamely ramified extensions of `Q_p` and the étale algebras built from them.
//!
//! A field of degree `n = e·f` with `p ∤ e` is `K_f(ϖ^{1/e})` for a uniformizer
//! `ϖ = ζ^c·p` of the unramified extension `K_f`, with `ζ` a generator of the
//! roots of unity of order `p^f − 1`. Over `K_f` the classes are indexed by
//! `c ∈ Z/g`, `g = gcd(e, p^f − 1)`. Over `K` Frobenius acts by `c ↦ p·c`, so
//! isomorphism classes over `K` are the orbits of that action. The
//! automorphism group has order `g` times the size of the stabilizer of `c`
//! in `Z/f`.
//!
//! Wild strata (`p | e`) are never computed here; they can only be compared
//! against imported fixture data.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::{is_prime, pow_mod};

#[derive(Debug, Error)]
pub enum LocalFieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("enumeration for p = {p}, n = {n} is only the tame sector (need p > n)")]
    PartialEnumeration { p: u64, n: usize },
    #[error("cannot read fixtures from {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed fixture file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Isomorphism class of a tame extension of `Q_p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TameFieldClass {
    pub p: u64,
    /// residue degree
    pub f: u32,
    /// ramification index, prime to `p`
    pub e: u64,
    /// `gcd(e, p^f − 1)`
    pub g: u64,
    /// Frobenius orbit in `Z/g`, sorted ascending
    pub orbit: Vec<u64>,
}

impl TameFieldClass {
    pub fn degree(&self) -> usize {
        (self.e * self.f as u64) as usize
    }

    /// `f·(e − 1)`
    pub fn disc_exponent(&self) -> u64 {
        self.f as u64 * (self.e - 1)
    }

    pub fn representative(&self) -> u64 {
        self.orbit[0]
    }

    /// Number of `i ∈ Z/f` whose Frobenius power fixes the orbit
    /// representative.
    pub fn frobenius_stabilizer(&self) -> u64 {
        let c = self.representative();
        (0..self.f)
            .filter(|&i| {
                let qi = pow_mod(self.p, i as u64, self.g);
                (c * ((qi + self.g - 1) % self.g)) % self.g == 0
            })
            .count() as u64
    }

    pub fn aut_order(&self) -> u64 {
        self.g * self.frobenius_stabilizer()
    }

    pub fn is_unramified(&self) -> bool {
        self.e == 1
    }

    /// Compact label such as `f2e1c0`.
    pub fn label(&self) -> String {
        format!("f{}e{}c{}", self.f, self.e, self.representative())
    }
}

impl fmt::Display for TameFieldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Orbits of `Z/g` under multiplication by `p`, each sorted, ordered by
/// smallest element.
fn frobenius_orbits(p: u64, g: u64) -> Vec<Vec<u64>> {
    let mut seen = vec![false; g as usize];
    let mut orbits = Vec::new();
    for c in 0..g {
        if seen[c as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = c;
        while !seen[x as usize] {
            seen[x as usize] = true;
            orbit.push(x);
            x = (x * (p % g)) % g;
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits
}

/// Field classes of one `(f, e)` stratum in canonical order.
pub fn stratum_classes(p: u64, f: u32, e: u64) -> Vec<TameFieldClass> {
    assert!(e % p != 0, "stratum (f={f}, e={e}) is wild for p={p}");
    // gcd(e, p^f − 1) computed modulo e to avoid overflow
    let g = if e == 1 {
        1
    } else {
        let r = (pow_mod(p, f as u64, e) + e - 1) % e;
        e.gcd(&r)
    };
    frobenius_orbits(p, g)
        .into_iter()
        .map(|orbit| TameFieldClass { p, f, e, g, orbit })
        .collect()
}

/// Output of [`enumerate_tame_field_classes`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldClassList {
    pub p: u64,
    pub n: usize,
    pub classes: Vec<TameFieldClass>,
    /// wild `(f, e)` strata that were not enumerated
    pub skipped: Vec<(u32, u64)>,
}

/// Classes of fields of degree `n` over `Q_p` with tame ramification, ordered
/// by `f` descending, `e` ascending, orbit representative ascending.
pub fn enumerate_tame_field_classes(p: u64, n: usize) -> Result<FieldClassList, LocalFieldError> {
    if !is_prime(p) {
        return Err(LocalFieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(LocalFieldError::ZeroDegree);
    }
    let mut classes = Vec::new();
    let mut skipped = Vec::new();
    for f in (1..=n).rev().filter(|f| n % f == 0) {
        let e = (n / f) as u64;
        if e % p == 0 {
            skipped.push((f as u32, e));
            continue;
        }
        classes.extend(stratum_classes(p, f as u32, e));
    }
    Ok(FieldClassList { p, n, classes, skipped })
}

/// An étale algebra: a multiset of tame field classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EtaleAlgebra {
    /// factors in canonical order; equal classes are adjacent
    factors: Vec<TameFieldClass>,
}

impl EtaleAlgebra {
    pub fn new(mut factors: Vec<TameFieldClass>) -> Self {
        factors.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
        Self { factors }
    }

    pub fn factors(&self) -> &[TameFieldClass] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(TameFieldClass::degree).sum()
    }

    pub fn disc_exponent(&self) -> u64 {
        self.factors.iter().map(TameFieldClass::disc_exponent).sum()
    }

    /// `∏ (multiplicity)! · aut(class)^multiplicity` over distinct classes.
    pub fn aut_order(&self) -> u64 {
        self.multiplicities()
            .into_iter()
            .map(|(class, m)| {
                let fact: u64 = (1..=m as u64).product();
                fact * class.aut_order().pow(m as u32)
            })
            .product()
    }

    /// Distinct classes with their multiplicities, in canonical order.
    pub fn multiplicities(&self) -> Vec<(&TameFieldClass, usize)> {
        let mut out: Vec<(&TameFieldClass, usize)> = Vec::new();
        for c in &self.factors {
            match out.last_mut() {
                Some((last, m)) if *last == c => *m += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// `∑ f_i`: the number of geometric connected components.
    pub fn residue_degree_sum(&self) -> u64 {
        self.factors.iter().map(|c| c.f as u64).sum()
    }

    /// `q^{−d}/#Aut` at `q = p`.
    pub fn mass_term(&self, p: u64) -> BigRational {
        BigRational::new(
            BigInt::from(1),
            BigInt::from(p).pow(self.disc_exponent() as u32) * BigInt::from(self.aut_order()),
        )
    }
}

impl fmt::Display for EtaleAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .multiplicities()
            .into_iter()
            .map(|(c, m)| if m == 1 { c.label() } else { format!("{}^{m}", c.label()) })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

fn canonical_key(c: &TameFieldClass) -> (std::cmp::Reverse<usize>, std::cmp::Reverse<u32>, u64, u64) {
    (
        std::cmp::Reverse(c.degree()),
        std::cmp::Reverse(c.f),
        c.e,
        c.representative(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraList {
    pub p: u64,
    pub n: usize,
    pub algebras: Vec<EtaleAlgebra>,
    /// set when some wild stratum of degree ≤ n was skipped
    pub partial: bool,
}

/// All étale algebras of degree `n` whose factors are tame.
pub fn enumerate_tame_etale_algebras(p: u64, n: usize) -> Result<AlgebraList, LocalFieldError> {
    if !is_prime(p) {
        return Err(LocalFieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(LocalFieldError::ZeroDegree);
    }
    let mut pool: Vec<TameFieldClass> = Vec::new();
    let mut partial = false;
    for d in (1..=n).rev() {
        let list = enumerate_tame_field_classes(p, d)?;
        partial |= !list.skipped.is_empty();
        pool.extend(list.classes);
    }
    pool.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));

    fn go(pool: &[TameFieldClass], start: usize, rest: usize, cur: &mut Vec<usize>, out: &mut Vec<EtaleAlgebra>) {
        if rest == 0 {
            out.push(EtaleAlgebra::new(cur.iter().map(|&i| pool[i].clone()).collect()));
            return;
        }
        for i in start..pool.len() {
            if pool[i].degree() <= rest {
                cur.push(i);
                go(pool, i, rest - pool[i].degree(), cur, out);
                cur.pop();
            }
        }
    }
    let mut algebras = Vec::new();
    go(&pool, 0, n, &mut Vec::new(), &mut algebras);
    Ok(AlgebraList { p, n, algebras, partial })
}

/// `∑ p^{−d}/#Aut` over all étale algebras of degree `n`; needs `p > n`.
pub fn algebra_mass_sum(p: u64, n: usize) -> Result<BigRational, LocalFieldError> {
    let list = enumerate_tame_etale_algebras(p, n)?;
    if list.partial {
        return Err(LocalFieldError::PartialEnumeration { p, n });
    }
    Ok(list
        .algebras
        .iter()
        .map(|a| a.mass_term(p))
        .fold(BigRational::zero(), |acc, t| acc + t))
}

/// One record of a local-fields database export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFixture {
    pub p: u64,
    pub n: usize,
    pub e: u64,
    pub f: u64,
    #[serde(rename = "c")]
    pub disc_exponent: u64,
    pub aut: u64,
    pub label: String,
}

impl FieldFixture {
    pub fn is_wild(&self) -> bool {
        self.p != 0 && self.e % self.p == 0
    }
}

pub fn load_fixtures(path: &Path) -> Result<Vec<FieldFixture>, LocalFieldError> {
    let text = std::fs::read_to_string(path).map_err(|source| LocalFieldError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureMismatch {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrossValidationReport {
    pub matched: Vec<String>,
    pub uncheckable: Vec<String>,
    pub mismatches: Vec<FixtureMismatch>,
}

impl CrossValidationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Matches tame fixtures against enumerated classes by `(e, f, d, aut)`,
/// with multiplicity; wild fixtures are listed as uncheckable.
pub fn crossvalidate_fixtures(fixtures: &[FieldFixture]) -> CrossValidationReport {
    type Key = (u64, u64, u64, u64);
    let mut report = CrossValidationReport::default();
    // available classes per (p, n), keyed by invariants
    let mut pools: BTreeMap<(u64, usize), BTreeMap<Key, usize>> = BTreeMap::new();
    for fx in fixtures {
        let mismatch = |reason: String| FixtureMismatch {
            label: fx.label.clone(),
            reason,
        };
        if !is_prime(fx.p) {
            report.mismatches.push(mismatch(format!("p = {} is not prime", fx.p)));
            continue;
        }
        if fx.e == 0 || fx.f == 0 || (fx.e * fx.f) as usize != fx.n {
            report
                .mismatches
                .push(mismatch(format!("n = {} but e·f = {}·{}", fx.n, fx.e, fx.f)));
            continue;
        }
        if fx.is_wild() {
            report.uncheckable.push(fx.label.clone());
            continue;
        }
        let pool = pools.entry((fx.p, fx.n)).or_insert_with(|| {
            let mut m = BTreeMap::new();
            if let Ok(list) = enumerate_tame_field_classes(fx.p, fx.n) {
                for c in list.classes {
                    *m.entry((c.e, c.f as u64, c.disc_exponent(), c.aut_order())).or_insert(0) += 1;
                }
            }
            m
        });
        let key = (fx.e, fx.f, fx.disc_exponent, fx.aut);
        match pool.get_mut(&key) {
            Some(count) if *count > 0 => {
                *count -= 1;
                report.matched.push(fx.label.clone());
            }
            Some(_) => report.mismatches.push(mismatch(format!(
                "more fixtures with (e={}, f={}, c={}, aut={}) than enumerated classes",
                fx.e, fx.f, fx.disc_exponent, fx.aut
            ))),
            None => report.mismatches.push(mismatch(format!(
                "no tame class over Q_{} of degree {} has (e={}, f={}, c={}, aut={})",
                fx.p, fx.n, fx.e, fx.f, fx.disc_exponent, fx.aut
            ))),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(list: &FieldClassList) -> Vec<(u32, u64, u64, u64)> {
        list.classes
            .iter()
            .map(|c| (c.f, c.e, c.disc_exponent(), c.aut_order()))
            .collect()
    }

    #[test]
    fn quadratic_extensions_of_q5() {
        let l = enumerate_tame_field_classes(5, 2).unwrap();
        assert_eq!(summary(&l), vec![(2, 1, 0, 2), (1, 2, 1, 2), (1, 2, 1, 2)]);
        assert!(l.skipped.is_empty());
    }

    #[test]
    fn base_field() {
        let l = enumerate_tame_field_classes(5, 1).unwrap();
        assert_eq!(summary(&l), vec![(1, 1, 0, 1)]);
    }

    #[test]
    fn cubic_extensions_of_q7() {
        let l = enumerate_tame_field_classes(7, 3).unwrap();
        assert_eq!(summary(&l), vec![(3, 1, 0, 3), (1, 3, 2, 3), (1, 3, 2, 3), (1, 3, 2, 3)]);
    }

    #[test]
    fn cubic_extensions_of_q5() {
        let l = enumerate_tame_field_classes(5, 3).unwrap();
        assert_eq!(summary(&l), vec![(3, 1, 0, 3), (1, 3, 2, 1)]);
    }

    #[test]
    fn frobenius_moves_classes_when_g_is_large() {
        // f=2, e=3 over Q_5: g = gcd(3, 24) = 3; orbits of Z/3 under x5 = x2
        // are {0} and {1,2}
        let s = stratum_classes(5, 2, 3);
        assert_eq!(s.iter().map(|c| c.orbit.clone()).collect::<Vec<_>>(), vec![vec![0], vec![1, 2]]);
        assert_eq!(s[0].aut_order(), 6);
        assert_eq!(s[1].aut_order(), 3);
    }

    #[test]
    fn wild_strata_are_skipped() {
        let l = enumerate_tame_field_classes(2, 2).unwrap();
        assert_eq!(l.skipped, vec![(1, 2)]);
        assert_eq!(summary(&l), vec![(2, 1, 0, 2)]);
        assert!(matches!(enumerate_tame_field_classes(4, 2), Err(LocalFieldError::NotPrime(4))));
    }

    #[test]
    fn algebras_of_degree_two_over_q5() {
        let l = enumerate_tame_etale_algebras(5, 2).unwrap();
        let rows: Vec<(u64, u64)> = l.algebras.iter().map(|a| (a.disc_exponent(), a.aut_order())).collect();
        assert_eq!(rows, vec![(0, 2), (1, 2), (1, 2), (0, 2)]);
        assert_eq!(l.algebras[3].to_string(), "f1e1c0^2");
        assert!(!l.partial);
        assert_eq!(enumerate_tame_etale_algebras(5, 1).unwrap().algebras.len(), 1);
    }

    #[test]
    fn algebra_counts_by_direct_multiset_count() {
        // p=5: degree 1,2,3 field counts are 1,3,2; degree 3 multisets:
        // {3}: 2, {2,1}: 3, {1,1,1}: 1
        assert_eq!(enumerate_tame_etale_algebras(5, 3).unwrap().algebras.len(), 6);
        // p=7: field counts 1,3,4 give 4 + 3 + 1
        assert_eq!(enumerate_tame_etale_algebras(7, 3).unwrap().algebras.len(), 8);
    }

    #[test]
    fn mass_sums() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(algebra_mass_sum(5, 2).unwrap(), r(6, 5));
        assert_eq!(algebra_mass_sum(5, 1).unwrap(), r(1, 1));
        assert_eq!(algebra_mass_sum(7, 3).unwrap(), r(57, 49));
        assert!(matches!(
            algebra_mass_sum(3, 4),
            Err(LocalFieldError::PartialEnumeration { p: 3, n: 4 })
        ));
    }

    #[test]
    fn aut_of_repeated_factor() {
        let unram = stratum_classes(5, 2, 1).remove(0);
        let a = EtaleAlgebra::new(vec![unram.clone(), unram.clone(), unram]);
        assert_eq!(a.aut_order(), 6 * 8);
    }

    fn fixture(p: u64, n: usize, e: u64, f: u64, c: u64, aut: u64, label: &str) -> FieldFixture {
        FieldFixture {
            p,
            n,
            e,
            f,
            disc_exponent: c,
            aut,
            label: label.into(),
        }
    }

    #[test]
    fn fixture_matching() {
        let r = crossvalidate_fixtures(&[fixture(5, 2, 2, 1, 1, 2, "5.2.1.1")]);
        assert_eq!(r.matched, vec!["5.2.1.1"]);
        assert!(r.passed());

        let r = crossvalidate_fixtures(&[fixture(2, 2, 2, 1, 2, 2, "2.2.2.1")]);
        assert_eq!(r.uncheckable, vec!["2.2.2.1"]);
        assert!(r.passed());

        let r = crossvalidate_fixtures(&[fixture(5, 2, 2, 1, 1, 3, "bogus")]);
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].label, "bogus");
    }

    #[test]
    fn fixture_multiplicity_is_enforced() {
        let three = vec![
            fixture(5, 2, 2, 1, 1, 2, "a"),
            fixture(5, 2, 2, 1, 1, 2, "b"),
            fixture(5, 2, 2, 1, 1, 2, "c"),
        ];
        let r = crossvalidate_fixtures(&three);
        assert_eq!(r.matched, vec!["a", "b"]);
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].label, "c");
    }

    #[test]
    fn fixture_json_keys() {
        let fx: Vec<FieldFixture> =
            serde_json::from_str(r#"[{"p":5,"n":2,"e":2,"f":1,"c":1,"aut":2,"label":"5.2.1.1"}]"#).unwrap();
        assert_eq!(fx[0].disc_exponent, 1);
    }
}
