//! Exact arithmetic in `Q[q^{±1/r} : r ≥ 1]` and its fraction field.
//!
//! [`QExpr`] is a finite sum of rational multiples of rational powers of the
//! formal variable `q`. [`QFrac`] is a quotient of two such sums, kept in a
//! canonical form so that structural equality is mathematical equality:
//!
//! * the denominator is a polynomial in `t = q^{1/r}` with nonzero constant
//!   term and leading coefficient one, where `r` is any common denominator
//!   of the exponents involved;
//! * numerator and denominator share no nonconstant factor in `Q[t]`.
//!
//! The form does not depend on the choice of `r`: if `N(t)` and `D(t)` are
//! coprime then so are `N(s^k)` and `D(s^k)`.

mod json;
mod laurent;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use self::laurent::Poly;

pub use self::json::{exponent_serde, exponent_vec_serde, parse_bigrational, parse_exponent};

/// Exponents of `q` are small rationals.
pub type Exponent = Rational64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("evaluation point {0} must be positive")]
    NonPositivePoint(String),
    #[error("expression has non-integral exponent {0}; request a real approximation")]
    NonIntegralExponent(String),
    #[error("denominator vanishes at q = {0}")]
    Pole(String),
    #[error("requested precision {requested:e} is finer than the attainable {attainable:e}")]
    PrecisionUnavailable { requested: f64, attainable: f64 },
    #[error("malformed expression: {0}")]
    Parse(String),
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn exponent_to_f64(e: &Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// A finite sum `∑ c_e q^e` with rational `e` and exact rational `c_e`.
///
/// No stored coefficient is zero, so the empty map is the zero expression.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QExpr {
    terms: BTreeMap<Exponent, BigRational>,
}

impl QExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        Self::monomial(BigRational::one(), Exponent::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, Exponent::zero())
    }

    /// `coeff · q^exponent`; the zero expression when `coeff` is zero.
    pub fn monomial(coeff: BigRational, exponent: Exponent) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { terms }
    }

    /// `q^exponent` with unit coefficient.
    pub fn q_pow(exponent: Exponent) -> Self {
        Self::monomial(BigRational::one(), exponent)
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| e.is_zero() && c.is_one())
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponent: Exponent) -> BigRational {
        self.terms
            .get(&exponent)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn min_exponent(&self) -> Option<Exponent> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms.keys().next_back().copied()
    }

    /// Least common denominator of the exponents (1 for the zero expression).
    pub fn exponent_denominator(&self) -> i64 {
        self.terms.keys().fold(1, |acc, e| acc.lcm(e.denom()))
    }

    pub fn has_integral_exponents(&self) -> bool {
        self.terms.keys().all(|e| e.is_integer())
    }

    fn as_monomial(&self) -> Option<(&Exponent, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Substitute `q ↦ q^factor`.
    pub fn scale_exponents(&self, factor: i64) -> Self {
        assert!(factor > 0, "exponent scale must be positive");
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e * factor, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn mul_q_pow(&self, shift: Exponent) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Dense coefficients in `t = q^{1/r}` together with the lowest power of
    /// `t` present. `r` must be a multiple of every exponent denominator.
    fn to_laurent(&self, r: i64) -> (i64, Poly) {
        let scaled: Vec<(i64, &BigRational)> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let k = e * r;
                debug_assert!(k.is_integer());
                (k.to_integer(), c)
            })
            .collect();
        let Some(shift) = scaled.first().map(|(k, _)| *k) else {
            return (0, Vec::new());
        };
        let top = scaled.last().map(|(k, _)| *k).unwrap_or(shift);
        let mut poly = vec![BigRational::zero(); (top - shift + 1) as usize];
        for (k, c) in scaled {
            poly[(k - shift) as usize] = c.clone();
        }
        (shift, poly)
    }

    fn from_laurent(r: i64, shift: i64, poly: &Poly) -> Self {
        Self {
            terms: poly
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (Exponent::new(shift + i as i64, r), c.clone()))
                .collect(),
        }
    }

    /// Exact value at a positive rational `q0`; every exponent must be an
    /// integer.
    pub fn eval_exact(&self, q0: &BigRational) -> Result<BigRational, ExactError> {
        if !q0.is_positive() {
            return Err(ExactError::NonPositivePoint(q0.to_string()));
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            if !e.is_integer() {
                return Err(ExactError::NonIntegralExponent(e.to_string()));
            }
            let k = e.to_integer();
            let k = i32::try_from(k).map_err(|_| ExactError::Parse(format!("exponent {k} too large")))?;
            acc += c * q0.pow(k);
        }
        Ok(acc)
    }

    /// Floating-point value at `q0 > 0`.
    pub fn eval_real(&self, q0: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * q0.powf(exponent_to_f64(e)))
            .sum()
    }

    /// Sum of absolute term values at `q0`; a scale for rounding estimates.
    fn magnitude_real(&self, q0: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN).abs() * q0.powf(exponent_to_f64(e)))
            .sum()
    }
}

impl From<BigRational> for QExpr {
    fn from(c: BigRational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for QExpr {
    fn from(c: i64) -> Self {
        Self::constant(rat(c))
    }
}

impl Neg for &QExpr {
    type Output = QExpr;
    fn neg(self) -> QExpr {
        QExpr {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for QExpr {
    type Output = QExpr;
    fn neg(self) -> QExpr {
        -&self
    }
}

impl Add for &QExpr {
    type Output = QExpr;
    fn add(self, rhs: &QExpr) -> QExpr {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &QExpr {
    type Output = QExpr;
    fn sub(self, rhs: &QExpr) -> QExpr {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &QExpr {
    type Output = QExpr;
    fn mul(self, rhs: &QExpr) -> QExpr {
        let mut out = QExpr::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty {
                (&self).$m(rhs)
            }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned_binop!(QExpr, Add, add);
forward_owned_binop!(QExpr, Sub, sub);
forward_owned_binop!(QExpr, Mul, mul);

fn fmt_exponent(e: &Exponent) -> String {
    if e.is_integer() {
        format!("{}", e.numer())
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for QExpr {
    /// Terms in descending exponent order, e.g. `q^4 + q^3` or `1 + q^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let var = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else {
                format!("q^{}", fmt_exponent(e))
            };
            match (abs.is_one(), var.is_empty()) {
                (_, true) => write!(f, "{abs}")?,
                (true, false) => write!(f, "{var}")?,
                (false, false) => write!(f, "{abs}*{var}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QExpr({self})")
    }
}

/// An element of the fraction field of [`QExpr`], always canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QFrac {
    num: QExpr,
    den: QExpr,
}

impl QFrac {
    pub fn zero() -> Self {
        Self {
            num: QExpr::zero(),
            den: QExpr::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            num: QExpr::one(),
            den: QExpr::one(),
        }
    }

    /// Builds and canonicalizes `num / den`.
    pub fn new(num: QExpr, den: QExpr) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        if let Some((e, c)) = den.as_monomial() {
            let inv = c.recip();
            let shift = -*e;
            return Ok(Self {
                num: num.scale(&inv).mul_q_pow(shift),
                den: QExpr::one(),
            });
        }
        let r = num.exponent_denominator().lcm(&den.exponent_denominator());
        let (sn, mut pn) = num.to_laurent(r);
        let (sd, mut pd) = den.to_laurent(r);
        // both parts may only involve powers of t^k; run Euclid in t^k
        let k = laurent::support_gcd(&pn).gcd(&laurent::support_gcd(&pd));
        let (cn, cd) = (laurent::compress(&pn, k), laurent::compress(&pd, k));
        let g = laurent::gcd(&cn, &cd);
        if laurent::degree(&g).unwrap_or(0) > 0 {
            pn = laurent::expand(&laurent::div_rem(&cn, &g).0, k);
            pd = laurent::expand(&laurent::div_rem(&cd, &g).0, k);
        }
        let lc = pd.last().cloned().expect("nonzero denominator");
        if !lc.is_one() {
            for c in pn.iter_mut().chain(pd.iter_mut()) {
                *c /= &lc;
            }
        }
        Ok(Self {
            num: QExpr::from_laurent(r, sn - sd, &pn),
            den: QExpr::from_laurent(r, 0, &pd),
        })
    }

    pub fn numer(&self) -> &QExpr {
        &self.num
    }

    pub fn denom(&self) -> &QExpr {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The underlying expression when the denominator is one.
    pub fn as_qexpr(&self) -> Option<&QExpr> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn has_integral_exponents(&self) -> bool {
        self.num.has_integral_exponents() && self.den.has_integral_exponents()
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &QFrac) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Substitute `q ↦ q^factor`; canonical form is preserved.
    pub fn scale_exponents(&self, factor: i64) -> Self {
        Self {
            num: self.num.scale_exponents(factor),
            den: self.den.scale_exponents(factor),
        }
    }

    pub fn eval_exact(&self, q0: &BigRational) -> Result<BigRational, ExactError> {
        let den = self.den.eval_exact(q0)?;
        if den.is_zero() {
            return Err(ExactError::Pole(q0.to_string()));
        }
        Ok(self.num.eval_exact(q0)? / den)
    }

    pub fn eval_real(&self, q0: f64) -> Result<f64, ExactError> {
        if q0.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(ExactError::NonPositivePoint(q0.to_string()));
        }
        let den = self.den.eval_real(q0);
        if den.abs() <= 1e-12 * self.den.magnitude_real(q0) {
            return Err(ExactError::Pole(q0.to_string()));
        }
        Ok(self.num.eval_real(q0) / den)
    }

    /// Rough absolute error of [`QFrac::eval_real`] at `q0`.
    fn real_error_bound(&self, q0: f64) -> f64 {
        let scale = self.num.magnitude_real(q0) / self.den.eval_real(q0).abs()
            + self.den.magnitude_real(q0) * self.num.eval_real(q0).abs()
                / self.den.eval_real(q0).powi(2);
        64.0 * f64::EPSILON * scale
    }
}

impl From<QExpr> for QFrac {
    fn from(num: QExpr) -> Self {
        Self {
            num,
            den: QExpr::one(),
        }
    }
}

impl From<i64> for QFrac {
    fn from(c: i64) -> Self {
        QExpr::from(c).into()
    }
}

impl From<BigRational> for QFrac {
    fn from(c: BigRational) -> Self {
        QExpr::from(c).into()
    }
}

impl Neg for &QFrac {
    type Output = QFrac;
    fn neg(self) -> QFrac {
        QFrac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for QFrac {
    type Output = QFrac;
    fn neg(self) -> QFrac {
        -&self
    }
}

impl Add for &QFrac {
    type Output = QFrac;
    fn add(self, rhs: &QFrac) -> QFrac {
        if self.den == rhs.den {
            if self.den.is_one() {
                return QFrac::from(&self.num + &rhs.num);
            }
            return QFrac::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero denominator");
        }
        QFrac::new(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl Sub for &QFrac {
    type Output = QFrac;
    fn sub(self, rhs: &QFrac) -> QFrac {
        self + &(-rhs)
    }
}

impl Mul for &QFrac {
    type Output = QFrac;
    fn mul(self, rhs: &QFrac) -> QFrac {
        if self.den.is_one() && rhs.den.is_one() {
            return QFrac::from(&self.num * &rhs.num);
        }
        QFrac::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

forward_owned_binop!(QFrac, Add, add);
forward_owned_binop!(QFrac, Sub, sub);
forward_owned_binop!(QFrac, Mul, mul);

impl fmt::Display for QFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for QFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QFrac({self})")
    }
}

/// An exact value that may diverge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extended {
    Finite(QFrac),
    Infinite,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&QFrac> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "infinity"),
        }
    }
}

/// Result of [`qe_eval`].
#[derive(Debug, Clone, PartialEq)]
pub enum QValue {
    Exact(BigRational),
    Approx(f64),
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QValue::Exact(v) => write!(f, "{v}"),
            QValue::Approx(v) => write!(f, "{v:.12}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn qe_monomial(coeff: BigRational, exponent: Exponent) -> QExpr {
    QExpr::monomial(coeff, exponent)
}

pub fn qe_arith(lhs: &QFrac, rhs: &QFrac, kind: ArithKind) -> Result<QFrac, ExactError> {
    Ok(match kind {
        ArithKind::Add => lhs + rhs,
        ArithKind::Sub => lhs - rhs,
        ArithKind::Mul => lhs * rhs,
        ArithKind::Div => lhs.checked_div(rhs)?,
    })
}

/// Evaluates `expr` at `q = q0`.
///
/// Integral exponents give an exact rational. Otherwise a real approximation
/// is returned when `precision` is given and double precision can honour it.
pub fn qe_eval(expr: &QFrac, q0: &BigRational, precision: Option<f64>) -> Result<QValue, ExactError> {
    if !q0.is_positive() {
        return Err(ExactError::NonPositivePoint(q0.to_string()));
    }
    if expr.has_integral_exponents() {
        return expr.eval_exact(q0).map(QValue::Exact);
    }
    let Some(precision) = precision else {
        let bad = expr
            .num
            .terms()
            .chain(expr.den.terms())
            .map(|(e, _)| *e)
            .find(|e| !e.is_integer())
            .expect("some exponent is fractional");
        return Err(ExactError::NonIntegralExponent(bad.to_string()));
    };
    let x = q0.to_f64().unwrap_or(f64::NAN);
    let value = expr.eval_real(x)?;
    let attainable = expr.real_error_bound(x);
    if precision < attainable {
        return Err(ExactError::PrecisionUnavailable {
            requested: precision,
            attainable,
        });
    }
    Ok(QValue::Approx(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    fn qp(n: i64, d: i64) -> QExpr {
        QExpr::q_pow(e(n, d))
    }

    #[test]
    fn monomials() {
        assert!(qe_monomial(rat(1), e(0, 1)).is_one());
        assert_eq!(qe_monomial(rat(1), e(-1, 1)).to_string(), "q^-1");
        assert!(qe_monomial(rat(0), e(5, 1)).is_zero());
        assert_eq!(qe_monomial(rat(0), e(5, 1)).num_terms(), 0);
    }

    #[test]
    fn divide_by_sqrt_q_minus_one() {
        // (q - 1)/(q^{1/2} - 1) = q^{1/2} + 1
        let num = QFrac::from(QExpr::q() - QExpr::one());
        let den = QFrac::from(qp(1, 2) - QExpr::one());
        let r = qe_arith(&num, &den, ArithKind::Div).unwrap();
        assert!(r.denom().is_one());
        assert_eq!(r.numer(), &(qp(1, 2) + QExpr::one()));
    }

    #[test]
    fn divide_by_two_thirds_is_not_polynomial() {
        // in t = q^{1/3}: (t^3 - 1)/(t^2 - 1) = (t^2 + t + 1)/(t + 1)
        let num = QFrac::from(QExpr::q() - QExpr::one());
        let den = QFrac::from(qp(2, 3) - QExpr::one());
        let r = qe_arith(&num, &den, ArithKind::Div).unwrap();
        assert!(!r.denom().is_one());
        assert_eq!(r.denom(), &(qp(1, 3) + QExpr::one()));
        assert_eq!(r.numer(), &(qp(2, 3) + qp(1, 3) + QExpr::one()));
    }

    #[test]
    fn additive_identity_and_division_by_zero() {
        let x = QFrac::new(QExpr::q() + QExpr::one(), qp(1, 2) - QExpr::from(3)).unwrap();
        assert_eq!(qe_arith(&x, &QFrac::zero(), ArithKind::Add).unwrap(), x);
        assert_eq!(
            qe_arith(&x, &QFrac::zero(), ArithKind::Div),
            Err(ExactError::DivisionByZero)
        );
    }

    #[test]
    fn canonical_form_moves_powers_of_q_and_normalizes_leading_coefficient() {
        // q^2 / (2q^3 + 2q^2) = (1/2) / (q + 1)
        let f = QFrac::new(qp(2, 1), (qp(3, 1) + qp(2, 1)).scale(&rat(2))).unwrap();
        assert_eq!(f.numer(), &QExpr::constant(BigRational::new(1.into(), 2.into())));
        assert_eq!(f.denom(), &(QExpr::q() + QExpr::one()));
        // q / (q^2 - 1) stays put, with q kept in the numerator
        let g = QFrac::new(QExpr::q(), qp(2, 1) - QExpr::one()).unwrap();
        assert_eq!(g.numer(), &QExpr::q());
    }

    #[test]
    fn evaluation() {
        let five = rat(5);
        let serre = QFrac::from(qp(-1, 1));
        assert_eq!(
            qe_eval(&serre, &five, None).unwrap(),
            QValue::Exact(BigRational::new(1.into(), 5.into()))
        );
        let hilb = QFrac::from(qp(4, 1) + qp(3, 1));
        assert_eq!(qe_eval(&hilb, &five, None).unwrap(), QValue::Exact(rat(750)));
        let root = QFrac::from(qp(1, 2) + QExpr::one());
        match qe_eval(&root, &five, Some(1e-9)).unwrap() {
            QValue::Approx(v) => assert!((v - (5f64.sqrt() + 1.0)).abs() < 1e-9),
            other => panic!("expected approximation, got {other:?}"),
        }
        assert!(matches!(
            qe_eval(&root, &five, None),
            Err(ExactError::NonIntegralExponent(_))
        ));
        assert!(matches!(
            qe_eval(&root, &five, Some(1e-30)),
            Err(ExactError::PrecisionUnavailable { .. })
        ));
    }

    #[test]
    fn poles_are_reported() {
        let f = QFrac::new(QExpr::one(), QExpr::q() - QExpr::from(5)).unwrap();
        assert!(matches!(f.eval_exact(&rat(5)), Err(ExactError::Pole(_))));
        let g = QFrac::new(QExpr::one(), qp(1, 2) - QExpr::from(2)).unwrap();
        assert!(matches!(g.eval_real(4.0), Err(ExactError::Pole(_))));
    }

    #[test]
    fn display_is_descending() {
        let b = QExpr::one() + qp(-1, 1) + qp(-2, 1).scale(&rat(2)) + qp(-3, 1);
        assert_eq!(b.to_string(), "1 + q^-1 + 2*q^-2 + q^-3");
        assert_eq!((qp(1, 2) - QExpr::one()).to_string(), "q^(1/2) - 1");
    }

    #[test]
    fn substitution_of_q_power() {
        let f = QFrac::new(QExpr::one(), QExpr::q() + QExpr::one()).unwrap();
        let g = f.scale_exponents(2);
        assert_eq!(g, QFrac::new(QExpr::one(), qp(2, 1) + QExpr::one()).unwrap());
    }
}
