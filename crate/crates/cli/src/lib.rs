//! Command-line front end for the `wildmckay` library.
//!
//! Exit codes: 0 when every check passes (or nothing is checked), 1 on a
//! verification failure, 2 on bad input.

pub mod report;
pub mod selftest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;
use wildmckay::exactq::{parse_bigrational, parse_exponent, qe_eval, Exponent, Extended, QFrac, QValue};
use wildmckay::is_prime;
use wildmckay::localfields::{
    algebra_mass_sum, crossvalidate_fixtures, enumerate_tame_etale_algebras, load_fixtures, FieldFixture,
};
use wildmckay::massformulas::{
    bhargava_mass, bhargava_series, mass_series_via_exp, recover_n_from_m, serre_mass, RecoveryMode,
};
use wildmckay::mckay::verify_wild_mckay;
use wildmckay::padic::{
    count_points_mod, monomial_integral, null_set_fraction, null_set_profile, smooth_measure_check, CountOptions,
    CountStrategy, PolySystem, DEFAULT_BUDGET,
};
use wildmckay::partitions::hilb_point_count;
use wildmckay::stringy::{stringy_count_snc, stringy_point_contribution, SncLogPairData};

pub use report::{Format, Report};

pub const BUDGET_ENV: &str = "WILDMCKAY_BUDGET";

#[derive(Debug, Clone, Parser)]
#[command(name = "wildmckay", version, about = "Exact checks of mass formulas and the wild McKay correspondence")]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Maximum number of candidate points a p-adic count may examine
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Truncation degree for power series in x
    #[arg(long, global = true, default_value_t = 12)]
    pub trunc: usize,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// Defaults for everything but the subcommand.
    pub fn for_command(command: Command) -> Self {
        Self {
            format: Format::Json,
            budget: DEFAULT_BUDGET,
            trunc: 12,
            command,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Mass formulas for extensions of a local field
    Mass {
        #[command(subcommand)]
        action: MassAction,
    },
    /// Tame étale algebras over Q_p
    Etale {
        #[command(subcommand)]
        action: EtaleAction,
    },
    /// The wild McKay correspondence for S_n acting on A^{2n}
    Mckay {
        #[command(subcommand)]
        action: McKayAction,
    },
    /// Stringy point counts of SNC log pairs
    Stringy {
        #[command(subcommand)]
        action: StringyAction,
    },
    /// p-adic measures by counting over Z/p^m
    Padic {
        #[command(subcommand)]
        action: PadicAction,
    },
    /// Run the full verification suite
    Selftest,
}

#[derive(Debug, Clone, Subcommand)]
pub enum MassAction {
    /// q_f^{1-n} for totally ramified extensions
    Serre {
        #[arg(long)]
        nmax: Option<usize>,
        /// residue degree of the base field over the reference field
        #[arg(long, default_value_t = 1)]
        f: usize,
    },
    /// sum_i P(n, n-i) q^{-i} for étale algebras
    Bhargava {
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Compare exp of the field mass series with Bhargava's masses
    Expcheck {
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Recover totally ramified masses from Bhargava's series
    Invert {
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::BaseChange)]
        mode: ModeArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    BaseChange,
    Consistency,
}

impl From<ModeArg> for RecoveryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::BaseChange => RecoveryMode::BaseChange,
            ModeArg::Consistency => RecoveryMode::Consistency,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum EtaleAction {
    /// List tame étale algebras of degree n
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// cross-check against a local-fields database export
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Compare the total mass with Bhargava's formula at q = p
    Mass {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Match database records against the tame classification
    Crossvalidate {
        #[arg(long)]
        fixtures: PathBuf,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum McKayAction {
    /// Check sum_M q^{2n-v(M)}/#C(H) against the Hilbert scheme count
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// also write the per-algebra breakdown as JSON
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum StringyAction {
    /// Evaluate the stringy count of an SNC log pair given as JSON
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// evaluate at this value of q (rational)
        #[arg(long)]
        at_q: Option<String>,
    },
    /// Contribution of a single point: q^a prod_j (q-1)/(q^{1-c_j}-1)
    Point {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// comma-separated coefficients of the divisors through the point
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        cs: String,
        #[arg(long)]
        at_q: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Lift,
    BruteForce,
}

#[derive(Debug, Clone, Subcommand)]
pub enum PadicAction {
    /// Count solutions modulo p^m
    Count {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Lift)]
        strategy: StrategyArg,
    },
    /// Check smoothness and Hensel stabilization up to p^{m_max}
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
    },
    /// Integral of |x|^{-c} over the maximal ideal
    Integral {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 60)]
        terms: u32,
    },
    /// Fraction of (Z/p^m)^n on which the system vanishes
    Nullset {
        #[arg(long)]
        input: PathBuf,
        /// single level; without it, every level the budget allows up to --m-max
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 12)]
        m_max: u32,
    },
}

/// Bad input: exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(e: impl std::fmt::Display) -> InputError {
    InputError(e.to_string())
}

/// Exit status and rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cli: &Cli) -> Outcome {
    match run_to_report(cli) {
        Ok(report) => {
            let code = match report.passed {
                Some(false) => 1,
                _ => 0,
            };
            Outcome {
                code,
                stdout: report.render(cli.format),
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn validate(cli: &Cli) -> Result<(), InputError> {
    if cli.budget == 0 {
        return Err(InputError("budget must be positive".into()));
    }
    if cli.trunc == 0 {
        return Err(InputError("truncation must be at least 1".into()));
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<(), InputError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(InputError(format!("{p} is not prime")))
    }
}

fn nmax(cli: &Cli, requested: Option<usize>) -> Result<usize, InputError> {
    let n = requested.unwrap_or(cli.trunc);
    if n == 0 {
        return Err(InputError("--nmax must be at least 1".into()));
    }
    Ok(n)
}

pub fn run_to_report(cli: &Cli) -> Result<Report, InputError> {
    validate(cli)?;
    match &cli.command {
        Command::Mass { action } => mass(cli, action),
        Command::Etale { action } => etale(action),
        Command::Mckay { action } => mckay(action),
        Command::Stringy { action } => stringy(action),
        Command::Padic { action } => padic(cli, action),
        Command::Selftest => Ok(selftest_report(cli)),
    }
}

fn mass(cli: &Cli, action: &MassAction) -> Result<Report, InputError> {
    match action {
        MassAction::Serre { nmax: n, f } => {
            let n_max = nmax(cli, *n)?;
            if *f == 0 {
                return Err(InputError("--f must be at least 1".into()));
            }
            let mut r = Report::new("mass serre").with_columns(&["n", "mass"]);
            r.set("f", *f);
            for n in 1..=n_max {
                r.row(vec![n.to_string(), serre_mass(n, *f).to_string()]);
            }
            Ok(r)
        }
        MassAction::Bhargava { nmax: n } => {
            let n_max = nmax(cli, *n)?;
            let mut r = Report::new("mass bhargava").with_columns(&["n", "mass", "hilbert_count"]);
            for n in 1..=n_max {
                r.row(vec![
                    n.to_string(),
                    bhargava_mass(n).to_string(),
                    hilb_point_count(n).to_string(),
                ]);
            }
            Ok(r)
        }
        MassAction::Expcheck { nmax: n } => {
            let n_max = nmax(cli, *n)?;
            let series = mass_series_via_exp(n_max);
            let mut r = Report::new("mass expcheck").with_columns(&["n", "exp_coefficient", "bhargava", "match"]);
            r.set("nmax", n_max);
            for n in 1..=n_max {
                let expected = QFrac::from(bhargava_mass(n));
                let ok = *series.coeff(n) == expected;
                r.verdict(ok);
                r.row(vec![n.to_string(), series.coeff(n).to_string(), expected.to_string(), ok.to_string()]);
            }
            Ok(r)
        }
        MassAction::Invert { nmax: n, mode } => {
            let n_max = nmax(cli, *n)?;
            let table = recover_n_from_m(&bhargava_series(n_max), (*mode).into()).map_err(input_err)?;
            let mut r = Report::new("mass invert").with_columns(&["n", "recovered", "serre", "match"]);
            r.set("nmax", n_max);
            r.set("mode", format!("{:?}", RecoveryMode::from(*mode)));
            for n in 1..=n_max {
                let expected = QFrac::from(serre_mass(n, 1));
                let got = table.totally_ramified(1, n).cloned().unwrap_or_else(QFrac::zero);
                let ok = got == expected;
                r.verdict(ok);
                r.row(vec![n.to_string(), got.to_string(), expected.to_string(), ok.to_string()]);
            }
            Ok(r)
        }
    }
}

fn rational_cells(x: &BigRational) -> [String; 2] {
    [x.numer().to_string(), x.denom().to_string()]
}

fn read_fixtures(path: &Path) -> Result<Vec<FieldFixture>, InputError> {
    load_fixtures(path).map_err(input_err)
}

fn crossvalidation_rows(r: &mut Report, fixtures: &[FieldFixture]) {
    let cv = crossvalidate_fixtures(fixtures);
    r.set("fixtures_matched", cv.matched.len());
    r.set("fixtures_uncheckable", cv.uncheckable.len());
    r.set(
        "fixture_mismatches",
        cv.mismatches
            .iter()
            .map(|m| json!({"label": m.label, "reason": m.reason}))
            .collect::<Vec<_>>(),
    );
    r.verdict(cv.passed());
}

fn etale(action: &EtaleAction) -> Result<Report, InputError> {
    match action {
        EtaleAction::Enumerate { p, n, fixtures } => {
            check_prime(*p)?;
            let list = enumerate_tame_etale_algebras(*p, *n).map_err(input_err)?;
            let mut r = Report::new("etale enumerate").with_columns(&["factors", "degree", "disc_exponent", "aut", "mass_num", "mass_den"]);
            r.set("p", *p);
            r.set("n", *n);
            r.set("count", list.algebras.len());
            r.set("complete", !list.partial);
            if list.partial {
                r.note("wild strata (p | e) are not enumerated; the list is incomplete");
            }
            for alg in &list.algebras {
                let [num, den] = rational_cells(&alg.mass_term(*p));
                r.row(vec![
                    alg.to_string(),
                    alg.degree().to_string(),
                    alg.disc_exponent().to_string(),
                    alg.aut_order().to_string(),
                    num,
                    den,
                ]);
            }
            if let Some(path) = fixtures {
                let fx = read_fixtures(path)?;
                let relevant: Vec<FieldFixture> = fx.into_iter().filter(|f| f.p == *p && f.n <= *n).collect();
                crossvalidation_rows(&mut r, &relevant);
            }
            Ok(r)
        }
        EtaleAction::Mass { p, n } => {
            check_prime(*p)?;
            let sum = algebra_mass_sum(*p, *n).map_err(input_err)?;
            let q = BigRational::from_integer(BigInt::from(*p));
            let expected = bhargava_mass(*n).eval_exact(&q).map_err(input_err)?;
            let mut r = Report::new("etale mass");
            r.set("p", *p);
            r.set("n", *n);
            r.set("mass", sum.to_string());
            r.set("bhargava", expected.to_string());
            r.verdict(sum == expected);
            Ok(r)
        }
        EtaleAction::Crossvalidate { fixtures } => {
            let fx = read_fixtures(fixtures)?;
            let cv = crossvalidate_fixtures(&fx);
            let mut r = Report::new("etale crossvalidate").with_columns(&["label", "status", "reason"]);
            for label in &cv.matched {
                r.row(vec![label.clone(), "matched".into(), String::new()]);
            }
            for label in &cv.uncheckable {
                r.row(vec![label.clone(), "uncheckable".into(), "wild".into()]);
            }
            for m in &cv.mismatches {
                r.row(vec![m.label.clone(), "mismatch".into(), m.reason.clone()]);
            }
            r.set("matched", cv.matched.len());
            r.set("uncheckable", cv.uncheckable.len());
            r.set("mismatches", cv.mismatches.len());
            r.verdict(cv.passed());
            Ok(r)
        }
    }
}

fn mckay(action: &McKayAction) -> Result<Report, InputError> {
    let McKayAction::Verify { p, n, table } = action;
    check_prime(*p)?;
    if *n == 0 {
        return Err(InputError("--n must be at least 1".into()));
    }
    let rep = verify_wild_mckay(*p, *n).map_err(input_err)?;
    if let Some(path) = table {
        let text = serde_json::to_string_pretty(&rep).expect("report serializes") + "\n";
        std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    let mut r = Report::new("mckay verify").with_columns(&["factors", "d", "v", "w", "aut", "term_num", "term_den"]);
    r.set("p", *p);
    r.set("n", *n);
    r.set("mass_side", rep.mass_side.clone());
    r.set("hilbert_side", rep.hilbert_side.clone());
    r.set("hilbert_polynomial", rep.hilbert_polynomial.clone());
    for row in &rep.rows {
        r.row(vec![
            row.factors.clone(),
            row.d.to_string(),
            row.v.to_string(),
            row.w.to_string(),
            row.aut.to_string(),
            row.term_num.clone(),
            row.term_den.clone(),
        ]);
    }
    r.verdict(rep.passed);
    Ok(r)
}

/// Decimal digits shown for real evaluations.
const REAL_DIGITS: usize = 12;

fn evaluate_into(r: &mut Report, value: &Extended, at_q: Option<&str>) -> Result<(), InputError> {
    match value {
        Extended::Infinite => r.set("value", "infinite"),
        Extended::Finite(x) => {
            r.set("value", x.to_string());
            r.set("numerator", x.numer().to_string());
            r.set("denominator", x.denom().to_string());
        }
    }
    let Some(q) = at_q else { return Ok(()) };
    let q0 = parse_bigrational(q).map_err(input_err)?;
    r.set("q", q0.to_string());
    match value {
        Extended::Infinite => r.set("value_at_q", "infinite"),
        Extended::Finite(x) => match qe_eval(x, &q0, Some(1e-6)).map_err(input_err)? {
            QValue::Exact(v) => r.set("value_at_q", v.to_string()),
            QValue::Approx(v) => {
                r.set("value_at_q", format!("{v:.REAL_DIGITS$e}"));
                r.note("fractional powers of q evaluated in double precision");
            }
        },
    }
    Ok(())
}

fn stringy(action: &StringyAction) -> Result<Report, InputError> {
    match action {
        StringyAction::Eval { input, at_q } => {
            let text = std::fs::read_to_string(input).map_err(|e| InputError(format!("{}: {e}", input.display())))?;
            let data: SncLogPairData = serde_json::from_str(&text).map_err(input_err)?;
            let value = stringy_count_snc(&data).map_err(input_err)?;
            let mut r = Report::new("stringy eval");
            evaluate_into(&mut r, &value, at_q.as_deref())?;
            Ok(r)
        }
        StringyAction::Point { a, cs, at_q } => {
            let a = parse_exponent(a).map_err(input_err)?;
            let cs: Vec<Exponent> = cs
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(parse_exponent)
                .collect::<Result<_, _>>()
                .map_err(input_err)?;
            let value = stringy_point_contribution(a, &cs);
            let mut r = Report::new("stringy point");
            r.set("a", a.to_string());
            r.set("cs", cs.iter().map(|c| c.to_string()).collect::<Vec<_>>());
            evaluate_into(&mut r, &value, at_q.as_deref())?;
            Ok(r)
        }
    }
}

fn read_system(path: &Path) -> Result<PolySystem, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let sys: PolySystem = serde_json::from_str(&text).map_err(input_err)?;
    sys.validate().map_err(input_err)?;
    Ok(sys)
}

fn padic(cli: &Cli, action: &PadicAction) -> Result<Report, InputError> {
    let opts = |strategy| CountOptions {
        budget: cli.budget,
        strategy,
    };
    match action {
        PadicAction::Count { input, m, strategy } => {
            let sys = read_system(input)?;
            let strategy = match strategy {
                StrategyArg::Lift => CountStrategy::Lift,
                StrategyArg::BruteForce => CountStrategy::BruteForce,
            };
            let c = count_points_mod(&sys, *m, &opts(strategy)).map_err(input_err)?;
            let mut r = Report::new("padic count");
            r.set("p", sys.p);
            r.set("m", c.m);
            r.set("count", c.count.to_string());
            r.set("normalized", c.normalized.to_string());
            Ok(r)
        }
        PadicAction::Measure { input, m_max } => {
            let sys = read_system(input)?;
            let mut r = Report::new("padic measure").with_columns(&["m", "count", "normalized"]);
            r.set("p", sys.p);
            r.set("d", sys.d);
            match smooth_measure_check(&sys, *m_max, &opts(CountStrategy::Lift)) {
                Ok(rep) => {
                    for level in &rep.levels {
                        r.row(vec![level.m.to_string(), level.count.to_string(), level.normalized.to_string()]);
                    }
                    r.set("measure", rep.measure.to_string());
                    r.verdict(true);
                }
                Err(e @ wildmckay::padic::PadicError::NotSmooth { .. })
                | Err(e @ wildmckay::padic::PadicError::HenselMismatch { .. }) => {
                    r.set("error", e.to_string());
                    r.verdict(false);
                }
                Err(e) => return Err(input_err(e)),
            }
            Ok(r)
        }
        PadicAction::Integral { c, p, terms } => {
            check_prime(*p)?;
            if *terms == 0 {
                return Err(InputError("--terms must be at least 1".into()));
            }
            let c = parse_exponent(c).map_err(input_err)?;
            let m = monomial_integral(c, *p, *terms);
            let mut r = Report::new("padic integral");
            r.set("c", c.to_string());
            r.set("p", *p);
            r.set("terms", *terms);
            r.set("partial_sum", format!("{:.REAL_DIGITS$e}", m.partial));
            match &m.exact {
                Extended::Infinite => r.set("exact", "infinite"),
                Extended::Finite(x) => {
                    r.set("exact", x.to_string());
                    let v = x.eval_real(*p as f64).map_err(input_err)?;
                    r.set("exact_at_p", format!("{v:.REAL_DIGITS$e}"));
                }
            }
            Ok(r)
        }
        PadicAction::Nullset { input, m, m_max } => {
            let sys = read_system(input)?;
            let mut r = Report::new("padic nullset").with_columns(&["m", "fraction", "approx"]);
            r.set("p", sys.p);
            r.set("n", sys.n);
            let profile = match m {
                Some(m) => vec![(*m, null_set_fraction(&sys, *m, &opts(CountStrategy::Lift)).map_err(input_err)?)],
                None => null_set_profile(&sys, *m_max, &opts(CountStrategy::Lift)).map_err(input_err)?,
            };
            for (m, frac) in &profile {
                let approx = frac.to_f64().unwrap_or(f64::NAN);
                r.row(vec![m.to_string(), frac.to_string(), format!("{approx:.6e}")]);
            }
            Ok(r)
        }
    }
}

fn selftest_report(cli: &Cli) -> Report {
    let opts = CountOptions {
        budget: cli.budget,
        strategy: CountStrategy::Lift,
    };
    let mut r = Report::new("selftest").with_columns(&["criterion", "status", "name", "detail"]);
    for o in selftest::all(&opts) {
        r.row(vec![
            o.id.to_string(),
            if o.passed { "pass" } else { "fail" }.to_string(),
            o.name.to_string(),
            o.detail.clone(),
        ]);
        r.verdict(o.passed);
    }
    r
}
