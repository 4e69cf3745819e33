//! The verification suite behind `wildmckay selftest`.
//!
//! Every check compares library output against an independently stated
//! value: a closed formula, a direct count, or a second route through the
//! library that shares no code with the first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use wildmckay::exactq::{Exponent, Extended, QExpr, QFrac};
use wildmckay::localfields::{algebra_mass_sum, enumerate_tame_etale_algebras, stratum_classes};
use wildmckay::massformulas::{bhargava_mass, bhargava_series, mass_series_via_exp, recover_n_from_m, RecoveryMode};
use wildmckay::mckay::{mckay_mass_side, verify_wild_mckay, weights_for_algebra};
use wildmckay::padic::{monomial_integral, null_set_profile, smooth_measure_check, CountOptions, Polynomial, PolySystem};
use wildmckay::partitions::{partition_count, partitions_into};
use wildmckay::series::TruncatedSeries;
use wildmckay::stringy::{stringy_count_snc, stringy_point_contribution, SncLogPairData, StratumCount, VerticalEntry};

use crate::report::Format;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, name: &'static str, failures: Vec<String>, ok_detail: String) -> Self {
        let passed = failures.is_empty();
        Self {
            id,
            name,
            passed,
            detail: if passed { ok_detail } else { failures.join("; ") },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {}: {} ({})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub const TRUNCATION: usize = 12;
pub const SMALL_CASES: [(u64, usize); 9] = [(5, 2), (5, 3), (5, 4), (7, 2), (7, 3), (7, 4), (11, 2), (11, 3), (11, 4)];

fn q_at(p: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

fn q_pow(k: i64) -> QExpr {
    QExpr::q_pow(Exponent::from_integer(k))
}

pub fn exponential_formula() -> Outcome {
    let series = mass_series_via_exp(TRUNCATION);
    let failures = (1..=TRUNCATION)
        .filter(|&n| *series.coeff(n) != QFrac::from(bhargava_mass(n)))
        .map(|n| format!("n={n}: got {}", series.coeff(n)))
        .collect();
    Outcome::new(
        1,
        "exponential formula reproduces Bhargava's masses",
        failures,
        format!("n = 1..={TRUNCATION} exact"),
    )
}

pub fn serre_recovery() -> Outcome {
    let mut failures = Vec::new();
    for mode in [RecoveryMode::BaseChange, RecoveryMode::Consistency] {
        match recover_n_from_m(&bhargava_series(TRUNCATION), mode) {
            Ok(table) => {
                for n in 1..=TRUNCATION {
                    let expected = QFrac::from(q_pow(1 - n as i64));
                    if table.totally_ramified(1, n) != Some(&expected) {
                        failures.push(format!("{mode:?} n={n}"));
                    }
                }
            }
            Err(e) => failures.push(format!("{mode:?}: {e}")),
        }
    }
    Outcome::new(
        2,
        "recovered totally ramified masses equal q^(1-n)",
        failures,
        format!("n = 1..={TRUNCATION}, both recovery modes"),
    )
}

pub fn tame_mass_sums() -> Outcome {
    let mut failures = Vec::new();
    for (p, n) in SMALL_CASES {
        let expected = bhargava_mass(n).eval_exact(&q_at(p)).expect("integral exponents");
        match algebra_mass_sum(p, n) {
            Ok(sum) if sum == expected => {}
            Ok(sum) => failures.push(format!("p={p} n={n}: {sum} != {expected}")),
            Err(e) => failures.push(format!("p={p} n={n}: {e}")),
        }
    }
    Outcome::new(
        3,
        "tame algebra masses equal Bhargava's formula",
        failures,
        format!("{} (p, n) pairs", SMALL_CASES.len()),
    )
}

/// `∑_{λ ⊢ n} p^{n + #λ}`, counted from the partitions themselves.
fn hilbert_by_partitions(p: u64, n: usize) -> BigRational {
    let q = q_at(p);
    (1..=n)
        .map(|k| q.pow((n + k) as i32) * BigRational::from_integer(BigInt::from(partitions_into(n, k).len())))
        .fold(BigRational::zero(), |a, b| a + b)
}

pub fn wild_mckay() -> Outcome {
    let mut failures = Vec::new();
    for (p, n) in SMALL_CASES {
        match (verify_wild_mckay(p, n), mckay_mass_side(p, n)) {
            (Ok(report), Ok(mass)) => {
                let hilb = hilbert_by_partitions(p, n);
                if !report.passed || mass != hilb {
                    failures.push(format!("p={p} n={n}: {mass} != {hilb}"));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("p={p} n={n}: {e}")),
        }
    }
    Outcome::new(
        4,
        "McKay mass side equals the Hilbert scheme point count",
        failures,
        format!("{} (p, n) pairs", SMALL_CASES.len()),
    )
}

pub fn stratum_masses() -> Outcome {
    let mut failures = Vec::new();
    let mut strata = 0;
    for p in [5u64, 7, 11] {
        for f in 1..=6u32 {
            for e in 1..=(6 / f as u64) {
                if e % p == 0 {
                    continue;
                }
                strata += 1;
                let d = f as i32 * (e as i32 - 1);
                let q = q_at(p);
                let lhs: BigRational = stratum_classes(p, f, e)
                    .iter()
                    .map(|c| q.pow(-d) / BigRational::from_integer(BigInt::from(c.aut_order())))
                    .fold(BigRational::zero(), |a, b| a + b);
                let rhs = q.pow(-d) / BigRational::from_integer(BigInt::from(f));
                if lhs != rhs {
                    failures.push(format!("p={p} f={f} e={e}: {lhs} != {rhs}"));
                }
            }
        }
    }
    Outcome::new(
        5,
        "each tame stratum has mass q^(f(1-e))/f",
        failures,
        format!("{strata} strata"),
    )
}

fn poly(terms: &[(&[u32], i64)]) -> Polynomial {
    Polynomial::new(terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect())
}

pub fn circle(p: u64) -> PolySystem {
    PolySystem::new(p, 2, 1, vec![poly(&[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -1)])]).expect("valid system")
}

/// `y² = x³ + x + 1`, smooth over `F_5`.
pub fn smooth_cubic() -> PolySystem {
    PolySystem::new(
        5,
        2,
        1,
        vec![poly(&[(&[0, 2], 1), (&[3, 0], -1), (&[1, 0], -1), (&[0, 0], -1)])],
    )
    .expect("valid system")
}

fn count_affine(p: u64, f: impl Fn(u64, u64) -> u64) -> u128 {
    (0..p).flat_map(|x| (0..p).map(move |y| (x, y))).filter(|&(x, y)| f(x, y) % p == 0).count() as u128
}

pub fn smooth_measures(opts: &CountOptions) -> Outcome {
    let mut failures = Vec::new();
    let cases = [
        ("circle p=5", circle(5), count_affine(5, |x, y| x * x + y * y + 4)),
        ("circle p=13", circle(13), count_affine(13, |x, y| x * x + y * y + 12)),
        ("cubic p=5", smooth_cubic(), count_affine(5, |x, y| y * y + 4 * (x * x * x + x + 1))),
    ];
    for (name, sys, points) in cases {
        match smooth_measure_check(&sys, 4, opts) {
            Ok(rep) => {
                let mu = BigRational::new(BigInt::from(points), BigInt::from(sys.p).pow(sys.d as u32));
                let mut expected = points;
                for level in &rep.levels {
                    if level.count != expected || level.normalized != mu {
                        failures.push(format!("{name} m={}: {} points", level.m, level.count));
                    }
                    expected *= sys.p as u128;
                }
                if rep.measure != mu {
                    failures.push(format!("{name}: measure {} != {mu}", rep.measure));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Outcome::new(
        6,
        "smooth measures stabilize at #X(F_p)/p^d",
        failures,
        "circle p=5,13 and y^2=x^3+x+1 p=5, m <= 4".into(),
    )
}

pub fn monomial_integrals() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for c in [Exponent::from_integer(0), Exponent::new(1, 2), Exponent::from_integer(-1), Exponent::new(2, 3)] {
        let m = monomial_integral(c, 5, 60);
        match m.exact.finite().map(|x| x.eval_real(5.0)) {
            Some(Ok(v)) => {
                let err = (v - m.partial).abs();
                worst = worst.max(err);
                if err >= 1e-9 {
                    failures.push(format!("c={c}: |{v} - {}| = {err:e}", m.partial));
                }
            }
            _ => failures.push(format!("c={c}: no finite closed form")),
        }
    }
    if !monomial_integral(Exponent::one(), 5, 60).exact.is_infinite() {
        failures.push("c=1 is not infinite".into());
    }
    Outcome::new(
        7,
        "monomial integral series match the closed form",
        failures,
        format!("max error {worst:.2e}, c=1 infinite"),
    )
}

pub fn null_set_decay(opts: &CountOptions) -> Outcome {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    let cases = [
        ("x^2-y^3", poly(&[(&[2, 0], 1), (&[0, 3], -1)])),
        ("xy", poly(&[(&[1, 1], 1)])),
    ];
    let tenth = BigRational::new(1.into(), 10.into());
    for (name, f) in cases {
        let sys = PolySystem::new(5, 2, 1, vec![f]).expect("valid system");
        match null_set_profile(&sys, 64, opts) {
            Ok(profile) => {
                let (m_last, last) = profile.last().expect("m = 1 always fits").clone();
                let first = &profile[0].1;
                if !(last < *first && last < tenth) {
                    failures.push(format!("{name}: m=1 {first}, m={m_last} {last}"));
                }
                detail.push(format!("{name}: {first} -> {last} at m={m_last}"));
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Outcome::new(8, "zero sets of nonconstant functions shrink", failures, detail.join(", "))
}

fn single_point(a: Exponent, cs: Vec<Exponent>, count: u64) -> SncLogPairData {
    let subset = (1..=cs.len()).collect();
    SncLogPairData {
        horizontal: cs,
        vertical: vec![VerticalEntry {
            a,
            strata: vec![StratumCount { subset, count }],
        }],
        total: None,
    }
}

pub fn stringy_evaluator() -> Outcome {
    let mut failures = Vec::new();
    let smooth = single_point(Exponent::zero(), vec![], 7);
    if stringy_count_snc(&smooth) != Ok(Extended::Finite(QFrac::from(7))) {
        failures.push("smooth input".into());
    }
    let one = QExpr::one();
    let coefficients = [
        Exponent::new(1, 2),
        Exponent::zero(),
        Exponent::from_integer(-1),
        Exponent::new(2, 3),
        Exponent::new(-3, 2),
        Exponent::new(5, 7),
    ];
    for a in [Exponent::zero(), Exponent::one(), Exponent::new(1, 2)] {
        for &c in &coefficients {
            let factor = QFrac::new(QExpr::q() - one.clone(), QExpr::q_pow(Exponent::one() - c) - one.clone()).expect("c < 1");
            let expected = &QFrac::from(QExpr::q_pow(a)) * &factor;
            let data = single_point(a, vec![c], 1);
            if stringy_count_snc(&data) != Ok(Extended::Finite(expected.clone())) {
                failures.push(format!("a={a} c={c}"));
            }
            if stringy_point_contribution(a, &[c]) != Extended::Finite(expected) {
                failures.push(format!("point a={a} c={c}"));
            }
        }
    }
    let half = single_point(Exponent::zero(), vec![Exponent::new(1, 2)], 1);
    let root_plus_one = QFrac::from(QExpr::q_pow(Exponent::new(1, 2)) + one);
    if stringy_count_snc(&half) != Ok(Extended::Finite(root_plus_one)) {
        failures.push("c=1/2 is not q^(1/2)+1".into());
    }
    for c in [Exponent::one(), Exponent::new(3, 2), Exponent::from_integer(4)] {
        if stringy_count_snc(&single_point(Exponent::zero(), vec![c], 1)) != Ok(Extended::Infinite) {
            failures.push(format!("c={c} on a populated stratum is finite"));
        }
        if stringy_count_snc(&single_point(Exponent::zero(), vec![c], 0)) != Ok(Extended::Finite(QFrac::zero())) {
            failures.push(format!("c={c} on an empty stratum"));
        }
    }
    Outcome::new(
        9,
        "stringy counts: smooth, single divisor, divergence",
        failures,
        format!("{} single-divisor cases", 3 * coefficients.len()),
    )
}

fn qfrac_pool() -> Vec<QFrac> {
    let q = QExpr::q();
    let one = QExpr::one();
    let root = QExpr::q_pow(Exponent::new(1, 2));
    vec![
        QFrac::zero(),
        QFrac::one(),
        QFrac::from(BigRational::new((-3).into(), 2.into())),
        QFrac::from(q.clone()),
        QFrac::from(q_pow(-2)),
        QFrac::from(root.clone() - one.clone()),
        QFrac::new(one.clone(), q.clone() + one.clone()).expect("nonzero"),
        QFrac::new(q.clone() - one.clone(), root.clone() + one.clone()).expect("nonzero"),
        QFrac::new(q_pow(2) + q.clone(), q.clone() - QExpr::from(3)).expect("nonzero"),
        QFrac::new(root.clone(), QExpr::q_pow(Exponent::new(1, 3)) - one.clone()).expect("nonzero"),
        QFrac::from(q_pow(3) - q.clone() * QExpr::from(2) + one.clone()),
        QFrac::new(QExpr::from(5), q_pow(2) + one).expect("nonzero"),
    ]
}

fn small_series() -> Vec<TruncatedSeries> {
    let values = [
        BigRational::zero(),
        BigRational::one(),
        -BigRational::one(),
        BigRational::new(1.into(), 2.into()),
    ];
    let mut out = Vec::new();
    for code in 0..4usize.pow(5) {
        let mut coeffs = vec![QFrac::zero()];
        let mut c = code;
        for _ in 0..5 {
            coeffs.push(QFrac::from(values[c % 4].clone()));
            c /= 4;
        }
        // spread the support so that all degrees up to 12 are touched
        let mut spread = vec![QFrac::zero(); TRUNCATION + 1];
        for (i, x) in coeffs.into_iter().enumerate().skip(1) {
            spread[[1, 2, 3, 5, 8][i - 1]] = x;
        }
        out.push(TruncatedSeries::from_coeffs(spread, TRUNCATION));
    }
    out
}

/// Exhaustive versions of the generated-case suites, for runs without the
/// test harness.
pub fn property_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0usize;

    let pool = qfrac_pool();
    for a in &pool {
        for b in &pool {
            for c in &pool {
                cases += 1;
                let ok = a + b == b + a
                    && &(a + b) + c == a + &(b + c)
                    && &(a * b) * c == a * &(b * c)
                    && a * &(b + c) == &(a * b) + &(a * c)
                    && (b.is_zero() || (a * b).checked_div(b).as_ref() == Ok(a));
                if !ok {
                    failures.push(format!("ring axioms at ({a}, {b}, {c})"));
                }
            }
        }
    }

    for s in small_series() {
        cases += 1;
        let ok = s.exp().and_then(|e| e.log()).as_ref() == Ok(&s);
        if !ok {
            failures.push(format!("exp/log at {s}"));
        }
    }

    for n in 0..=40 {
        for k in 0..=n {
            cases += 1;
            if partition_count(n, k) != partitions_into(n, k).len() as u128 {
                failures.push(format!("P({n}, {k})"));
            }
        }
    }

    for p in [7u64, 11] {
        for n in 1..=6 {
            for alg in enumerate_tame_etale_algebras(p, n).map(|l| l.algebras).unwrap_or_default() {
                cases += 1;
                let w = weights_for_algebra(&alg);
                if w.w != w.v {
                    failures.push(format!("w != v for {alg} over Q_{p}"));
                }
            }
        }
    }

    let report = crate::run_to_report(&crate::Cli::for_command(crate::Command::Mckay {
        action: crate::McKayAction::Verify {
            p: 7,
            n: 4,
            table: None,
        },
    }));
    match report {
        Ok(r) => {
            for format in [Format::Json, Format::Csv] {
                cases += 1;
                if r.render(format) != r.clone().render(format) {
                    failures.push(format!("{format:?} output differs between renders"));
                }
            }
        }
        Err(e) => failures.push(format!("determinism run: {e}")),
    }

    failures.truncate(10);
    Outcome::new(
        10,
        "ring axioms, exp/log, partitions, w = v, deterministic output",
        failures,
        format!("{cases} cases"),
    )
}

pub fn all(opts: &CountOptions) -> Vec<Outcome> {
    vec![
        exponential_formula(),
        serre_recovery(),
        tame_mass_sums(),
        wild_mckay(),
        stratum_masses(),
        smooth_measures(opts),
        monomial_integrals(),
        null_set_decay(opts),
        stringy_evaluator(),
        property_suites(),
    ]
}
