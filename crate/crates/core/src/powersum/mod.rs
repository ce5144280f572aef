//! Finite power sums `Σ c_j · x^{e_j}` with rational exponents and
//! quadratic-surd coefficients, their exact derivatives, and the growth
//! hypotheses that the witness construction relies on.

mod parse;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub use parse::{parse_function, ParseError, ParseErrorKind};

/// Rational exponent of a single power term.
pub type Exponent = Ratio<i64>;

/// Squares of primes below this bound are pulled out of radicands.
const RADICAND_TRIAL_LIMIT: u64 = 1 << 16;

/// An exact scalar `q · √d` with `q` rational and `d` a squarefree positive
/// integer (`d = 1` for plain rationals).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    rational: BigRational,
    radicand: BigUint,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar {
            rational: q,
            radicand: BigUint::one(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// `√q` for a non-negative rational `q`, normalized so the radicand is a
    /// squarefree integer. Returns `None` for negative `q`.
    pub fn sqrt_of(q: &BigRational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Self::zero());
        }
        // √(n/d) = √(n·d) / d
        let n = q.numer().magnitude().clone();
        let d = q.denom().magnitude().clone();
        let (square_root, squarefree) = split_square(&(&n * &d));
        let rational = BigRational::new(BigInt::from(square_root), BigInt::from(d));
        Some(Scalar {
            rational,
            radicand: squarefree,
        })
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one() || self.rational.is_zero()
    }

    /// Sign of the scalar; the surd factor is always positive.
    pub fn signum(&self) -> Ordering {
        self.rational.cmp(&BigRational::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let rational = &self.rational * q;
        if rational.is_zero() {
            return Self::zero();
        }
        Scalar {
            rational,
            radicand: self.radicand.clone(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        // q1√d1 · q2√d2 = q1 q2 √(d1 d2)
        let product = BigRational::from_integer(BigInt::from(&self.radicand * &other.radicand));
        let root = Scalar::sqrt_of(&product).expect("radicands are positive");
        root.scale(&(&self.rational * &other.rational))
    }

    pub fn neg(&self) -> Scalar {
        self.scale(&-BigRational::one())
    }

    /// Sum of two scalars sharing a radicand; `None` when the radicands differ.
    pub fn checked_add(&self, other: &Scalar) -> Option<Scalar> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.radicand != other.radicand {
            return None;
        }
        Some(
            Scalar {
                rational: &self.rational + &other.rational,
                radicand: self.radicand.clone(),
            }
            .normalized(),
        )
    }

    fn normalized(self) -> Self {
        if self.rational.is_zero() {
            Self::zero()
        } else {
            self
        }
    }

    /// `|scalar|^degree` as an exact rational; `degree` must be even whenever
    /// the radicand is not 1.
    pub(crate) fn abs_pow(&self, degree: u32) -> BigRational {
        debug_assert!(self.radicand.is_one() || degree % 2 == 0);
        let r = Pow::pow(&self.rational.abs(), degree);
        if self.radicand.is_one() {
            r
        } else {
            let d = BigInt::from(self.radicand.clone());
            r * BigRational::from_integer(num_traits::pow(d, (degree / 2) as usize))
        }
    }

    /// Compares two scalars exactly by comparing signed squares.
    pub fn cmp_exact(&self, other: &Scalar) -> Ordering {
        let a = self.signed_square();
        let b = other.signed_square();
        a.cmp(&b)
    }

    fn signed_square(&self) -> BigRational {
        let sq = self.abs_pow(2);
        if self.rational.is_negative() {
            -sq
        } else {
            sq
        }
    }

    /// Floating point approximation, for reporting only.
    pub fn to_f64(&self) -> f64 {
        let q = self.rational.to_f64().unwrap_or(f64::NAN);
        let d = self.radicand.to_f64().unwrap_or(f64::NAN);
        q * d.sqrt()
    }
}

trait Pow {
    fn pow(&self, e: u32) -> Self;
}

impl Pow for BigRational {
    fn pow(&self, e: u32) -> Self {
        BigRational::new(
            num_traits::pow(self.numer().clone(), e as usize),
            num_traits::pow(self.denom().clone(), e as usize),
        )
    }
}

/// Splits `n = s² · m` with `m` squarefree (up to the trial bound).
fn split_square(n: &BigUint) -> (BigUint, BigUint) {
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut p: u64 = 2;
    while p < RADICAND_TRIAL_LIMIT {
        let pp = BigUint::from(p * p);
        if pp > rest {
            break;
        }
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        square *= r;
        rest = BigUint::one();
    }
    (square, rest)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        if !self.radicand.is_one() {
            write!(f, "*sqrt({})", self.radicand)?;
        }
        Ok(())
    }
}

/// One power term `coefficient · x^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coefficient: Scalar,
    pub exponent: Exponent,
}

/// A normalized finite power sum on `x ≥ 1`.
///
/// Terms are kept with strictly decreasing exponents and nonzero
/// coefficients; [`PowerSumExpr::from_terms`] merges like exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PowerSumExpr {
    terms: Vec<Term>,
}

/// Two terms with the same exponent but different radicands cannot be merged
/// into a single-surd coefficient.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("terms with exponent {exponent} mix radicands {first} and {second}")]
pub struct MixedRadicands {
    pub exponent: Exponent,
    pub first: BigUint,
    pub second: BigUint,
}

impl PowerSumExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Result<Self, MixedRadicands> {
        let mut terms: Vec<Term> = terms.into_iter().filter(|t| !t.coefficient.is_zero()).collect();
        terms.sort_by(|a, b| b.exponent.cmp(&a.exponent));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == term.exponent => {
                    last.coefficient = last.coefficient.checked_add(&term.coefficient).ok_or_else(|| {
                        MixedRadicands {
                            exponent: term.exponent,
                            first: last.coefficient.radicand.clone(),
                            second: term.coefficient.radicand.clone(),
                        }
                    })?;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| !t.coefficient.is_zero());
        Ok(PowerSumExpr { terms: merged })
    }

    /// Single term `c · x^e`.
    pub fn monomial(coefficient: Scalar, exponent: Exponent) -> Self {
        Self::from_terms([Term {
            coefficient,
            exponent,
        }])
        .expect("a single term never mixes radicands")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Term with the largest exponent.
    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// True when every exponent is an integer and every coefficient rational.
    pub fn is_rational_polynomial_like(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.exponent.is_integer() && t.coefficient.is_rational())
    }

    pub fn add(&self, other: &PowerSumExpr) -> Result<Self, MixedRadicands> {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    /// Exact derivative of the given order.
    ///
    /// Each term `a·x^e` maps to `a·e(e−1)…(e−order+1)·x^{e−order}`; terms whose
    /// falling factorial vanishes are dropped.
    pub fn differentiate(&self, order: u32) -> PowerSumExpr {
        let terms = self.terms.iter().filter_map(|t| {
            let mut factor = BigRational::one();
            for i in 0..order as i64 {
                let e = t.exponent - Exponent::from_integer(i);
                factor *= BigRational::new((*e.numer()).into(), (*e.denom()).into());
                if factor.is_zero() {
                    return None;
                }
            }
            Some(Term {
                coefficient: t.coefficient.scale(&factor),
                exponent: t.exponent - Exponent::from_integer(order as i64),
            })
        });
        // Distinct exponents stay distinct under a common shift.
        PowerSumExpr {
            terms: terms.collect(),
        }
    }

    /// Floating point evaluation, for reporting and heuristics only.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let e = *t.exponent.numer() as f64 / *t.exponent.denom() as f64;
                t.coefficient.to_f64() * x.powf(e)
            })
            .sum()
    }
}

impl fmt::Display for PowerSumExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coefficient.signum() == Ordering::Less;
            let magnitude = if negative { t.coefficient.neg() } else { t.coefficient.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}*x^({})", magnitude, t.exponent)?;
        }
        Ok(())
    }
}

impl Serialize for PowerSumExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl std::str::FromStr for PowerSumExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_function(s)
    }
}

/// Outcome of deciding the two growth hypotheses for a given `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub k: u32,
    /// `f^{(k)}(x) → 0`.
    pub vanishing_kth: bool,
    /// `limsup f^{(k−1)}(x) = +∞`.
    pub unbounded_k_minus_1: bool,
    /// Exponent of the dominant term, when `f` is not identically zero.
    #[serde(serialize_with = "crate::json::opt_display")]
    pub witness_exponent: Option<Exponent>,
}

impl HypothesisReport {
    pub fn admissible(&self) -> bool {
        self.vanishing_kth && self.unbounded_k_minus_1
    }
}

/// Decides both hypotheses exactly from exponents and signs.
///
/// `f^{(k)} → 0` iff every exponent is below `k`. `f^{(k−1)}` is dominated by
/// the leading term, whose differentiated coefficient keeps the sign of the
/// original one when the exponent exceeds `k − 1`; so the limsup is `+∞` iff
/// the leading exponent exceeds `k − 1` with a positive coefficient.
pub fn check_hypotheses(f: &PowerSumExpr, k: u32) -> HypothesisReport {
    let k_exp = Exponent::from_integer(k as i64);
    let vanishing_kth = f.terms().iter().all(|t| t.exponent < k_exp);
    let leading = f.leading();
    let unbounded_k_minus_1 = leading
        .map(|t| t.exponent > k_exp - 1 && t.coefficient.is_positive())
        .unwrap_or(false);
    HypothesisReport {
        k,
        vanishing_kth,
        unbounded_k_minus_1,
        witness_exponent: leading.map(|t| t.exponent),
    }
}

/// Rational literal helper shared by the parser and the CLI.
pub(crate) fn decimal_to_rational(int_part: &str, frac_part: &str) -> BigRational {
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    BigRational::new(numer, denom)
}

pub(crate) fn rational_to_exponent(q: &BigRational) -> Option<Exponent> {
    let n = q.numer().to_i64()?;
    let d = q.denom().to_i64()?;
    Some(Exponent::new(n, d))
}

/// Largest `r ≥ 0` with `r^n ≤ value`.
pub(crate) fn iroot(value: &BigUint, n: u32) -> BigUint {
    match n {
        1 => value.clone(),
        2 => value.sqrt(),
        _ => value.nth_root(n),
    }
}

/// Exact `n`-th root of a non-negative rational, if it is rational.
pub(crate) fn exact_rational_root(q: &BigRational, n: u32) -> Option<BigRational> {
    if n == 1 {
        return Some(q.clone());
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let rn = iroot(num, n);
    if num_traits::pow(rn.clone(), n as usize) != *num {
        return None;
    }
    let rd = iroot(den, n);
    if num_traits::pow(rd.clone(), n as usize) != *den {
        return None;
    }
    Some(BigRational::new(rn.into(), rd.into()))
}

pub(crate) fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}
