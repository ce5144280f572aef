//! Certified evaluation of power sums at integer arguments.
//!
//! A value `g(x)` is carried as a [`RootSum`]: an exact rational plus a sum of
//! signed real roots `±R^{1/N}` with `R` rational. Every power term
//! `c·√d·x^{p/q}` is such a root, so evaluation is exact up to the final
//! integer root extraction, which is done with exact floor roots. Enclosures
//! are therefore always rigorous; precision only controls their width.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::powersum::{exact_rational_root, iroot, lcm_u32, PowerSumExpr, Term};

/// Default hard cap on working precision, in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 1 << 20;
/// Precision at which refinement loops start.
pub const DEFAULT_START_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: DEFAULT_START_BITS,
            cap_bits: DEFAULT_PRECISION_CAP,
        }
    }
}

impl Precision {
    pub fn with_cap(cap_bits: u32) -> Self {
        Precision {
            start_bits: DEFAULT_START_BITS.min(cap_bits.max(1)),
            cap_bits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation point {0} is outside the domain x >= 1")]
    Domain(BigInt),
    #[error("requested precision {requested} bits exceeds the cap of {cap} bits")]
    PrecisionCap { requested: u32, cap: u32 },
    #[error("undecidable: {what} not resolved at {cap} bits")]
    Undecidable { what: String, cap: u32 },
}

/// A closed interval `[lo, hi]` guaranteed to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
    precision_bits: u32,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational, precision_bits: u32) -> Option<Self> {
        (lo <= hi).then_some(Enclosure { lo, hi, precision_bits })
    }

    pub fn exact(value: BigRational) -> Self {
        Enclosure {
            lo: value.clone(),
            hi: value,
            precision_bits: u32::MAX,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn shifted(&self, q: &BigRational) -> Enclosure {
        Enclosure {
            lo: &self.lo + q,
            hi: &self.hi + q,
            precision_bits: self.precision_bits,
        }
    }

    /// Upper bound on `|value|`.
    pub fn abs_upper(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound on `|value|`.
    pub fn abs_lower(&self) -> BigRational {
        if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            -self.hi.clone()
        } else {
            BigRational::zero()
        }
    }

    /// Enclosure of `|value|`.
    pub fn abs(&self) -> Enclosure {
        Enclosure {
            lo: self.abs_lower(),
            hi: self.abs_upper(),
            precision_bits: self.precision_bits,
        }
    }

    /// Floor of the enclosed value when every point of the interval shares it.
    pub fn floor(&self) -> Option<BigInt> {
        let f = self.lo.floor().to_integer();
        if self.is_exact() || self.hi < BigRational::from_integer(&f + 1) {
            Some(f)
        } else {
            None
        }
    }

    /// Position of the enclosed value relative to `q`, when decided.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        if &self.hi < q {
            Some(Ordering::Less)
        } else if &self.lo > q {
            Some(Ordering::Greater)
        } else if self.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Midpoint as `f64`, for display only.
    pub fn approx(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_f64().unwrap_or(f64::NAN), self.hi.to_f64().unwrap_or(f64::NAN))
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Enclosure", 4)?;
        s.serialize_field("lo", &self.lo.to_string())?;
        s.serialize_field("hi", &self.hi.to_string())?;
        s.serialize_field("precision_bits", &self.precision_bits)?;
        let approx = self.approx();
        s.serialize_field("approx", &approx.is_finite().then_some(approx))?;
        s.end()
    }
}

/// `±radicand^{1/degree}` with a positive rational radicand that is not a
/// perfect `degree`-th power.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RootTerm {
    negative: bool,
    radicand: BigRational,
    degree: u32,
    /// `2^log2_floor ≤ |term|`.
    log2_floor: i64,
}

impl RootTerm {
    fn new(negative: bool, radicand: BigRational, degree: u32) -> Self {
        let bn = radicand.numer().bits() as i64;
        let bd = radicand.denom().bits() as i64;
        let log2_floor = Integer::div_floor(&(bn - 1 - bd), &(degree as i64));
        RootTerm {
            negative,
            radicand,
            degree,
            log2_floor,
        }
    }

    /// `floor(2^scale · radicand^{1/degree})`.
    fn scaled_floor(&self, scale: u64) -> BigUint {
        let num = self.radicand.numer().magnitude() << (scale * self.degree as u64);
        let q = num / self.radicand.denom().magnitude();
        iroot(&q, self.degree)
    }

    /// `|other| / |self|` when it is rational.
    fn ratio_to(&self, other: &RootTerm) -> Option<BigRational> {
        let l = self.degree.lcm(&other.degree);
        let mine = Pow::pow(&self.radicand, l / self.degree);
        let theirs = Pow::pow(&other.radicand, l / other.degree);
        exact_rational_root(&(theirs / mine), l)
    }

    fn scaled(&self, c: &BigRational) -> Option<RootTerm> {
        if c.is_zero() {
            return None;
        }
        let factor = BigRational::new(
            num_traits::pow(c.numer().abs(), self.degree as usize),
            num_traits::pow(c.denom().clone(), self.degree as usize),
        );
        Some(RootTerm::new(self.negative ^ c.is_negative(), mul_q(&self.radicand, &factor), self.degree))
    }
}

/// gcd with one Euclidean step first; the binary gcd alone is slow when the
/// operands differ greatly in size.
fn gcd_unbalanced(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = (a.magnitude(), b.magnitude());
    if a.is_one() || b.is_one() {
        return BigInt::one();
    }
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if small.is_zero() {
        return BigInt::from(big.clone());
    }
    BigInt::from((big % small).gcd(small))
}

/// `a · b` in lowest terms, cross-cancelling like `Ratio::mul`.
fn mul_q(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    let g1 = gcd_unbalanced(a.numer(), b.denom());
    let g2 = gcd_unbalanced(b.numer(), a.denom());
    BigRational::new_raw(
        (a.numer() / &g1) * (b.numer() / &g2),
        (a.denom() / &g2) * (b.denom() / &g1),
    )
}

/// `q + m/2^e`, skipping the general gcd when `q` is itself dyadic.
fn add_dyadic(q: &BigRational, m: BigInt, e: u64) -> BigRational {
    let d = q.denom();
    let dz = d.trailing_zeros().unwrap_or(0);
    if !(d >> dz).is_one() {
        return q + BigRational::new(m, BigInt::one() << e);
    }
    let top = e.max(dz);
    let num = (q.numer() << (top - dz)) + (m << (top - e));
    match num.trailing_zeros() {
        None => BigRational::zero(),
        Some(z) => {
            let z = z.min(top);
            BigRational::new_raw(num >> z, BigInt::one() << (top - z))
        }
    }
}

/// A certified real number `exact + Σ ±R_j^{1/N_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RootSum {
    exact: BigRational,
    roots: Vec<RootTerm>,
}

impl RootSum {
    pub fn from_rational(q: BigRational) -> Self {
        RootSum {
            exact: q,
            roots: Vec::new(),
        }
    }

    /// `g(x)` for an integer `x ≥ 1`.
    pub fn point(g: &PowerSumExpr, x: &BigInt) -> Result<Self, EvalError> {
        if x < &BigInt::one() {
            return Err(EvalError::Domain(x.clone()));
        }
        let mut sum = RootSum::default();
        for term in g.terms() {
            sum.push_term(term, x, false);
        }
        Ok(sum)
    }

    /// `Σ_j |term_j|` with every term evaluated at the endpoint of `[a, b]`
    /// where its magnitude is largest. Bounds `sup_{[a,b]} |g|` from above.
    pub fn abs_majorant(g: &PowerSumExpr, a: &BigInt, b: &BigInt) -> Result<Self, EvalError> {
        if a < &BigInt::one() {
            return Err(EvalError::Domain(a.clone()));
        }
        let mut sum = RootSum::default();
        for term in g.terms() {
            let at = if term.exponent.is_positive() { b } else { a };
            sum.push_term(term, at, true);
        }
        Ok(sum)
    }

    fn push_term(&mut self, term: &Term, x: &BigInt, absolute: bool) {
        let e = term.exponent;
        let q = *e.denom() as u32;
        let surd = !term.coefficient.is_rational();
        let degree = lcm_u32(q, if surd { 2 } else { 1 });
        // |c|·x^{p/q} = (|c|^N · x^{pN/q})^{1/N}
        let x_power = *e.numer() * (degree / q) as i64;
        let xp = num_traits::pow(x.clone(), x_power.unsigned_abs() as usize);
        let xp = if x_power >= 0 {
            BigRational::from_integer(xp)
        } else {
            BigRational::new_raw(BigInt::one(), xp)
        };
        let radicand = mul_q(&term.coefficient.abs_pow(degree), &xp);
        let negative = !absolute && term.coefficient.signum() == Ordering::Less;
        match exact_rational_root(&radicand, degree) {
            Some(root) => {
                if negative {
                    self.exact -= root;
                } else {
                    self.exact += root;
                }
            }
            None => self.absorb(RootTerm::new(negative, radicand, degree)),
        }
    }

    /// Adds a root term, merging it with an existing one whose ratio to it is
    /// rational. Radicals with pairwise irrational ratios are linearly
    /// independent over the rationals, so a sum that still has root terms is
    /// irrational and every comparison with a rational terminates.
    fn absorb(&mut self, root: RootTerm) {
        for i in 0..self.roots.len() {
            if let Some(q) = self.roots[i].ratio_to(&root) {
                let old = &self.roots[i];
                let sign = |neg: bool| if neg { -BigRational::one() } else { BigRational::one() };
                let c = sign(old.negative) + sign(root.negative) * q;
                if c.is_zero() {
                    self.roots.swap_remove(i);
                } else {
                    let factor = Pow::pow(c.abs(), old.degree);
                    self.roots[i] = RootTerm::new(c.is_negative(), mul_q(&old.radicand, &factor), old.degree);
                }
                return;
            }
        }
        self.roots.push(root);
    }

    pub fn is_exact(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.is_exact().then_some(&self.exact)
    }

    pub fn add_rational(mut self, q: &BigRational) -> Self {
        self.exact += q;
        self
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        RootSum {
            exact: &self.exact * c,
            roots: self.roots.iter().filter_map(|r| r.scaled(c)).collect(),
        }
    }

    pub fn plus(mut self, other: &RootSum) -> Self {
        self.exact += &other.exact;
        for root in &other.roots {
            self.absorb(root.clone());
        }
        self
    }

    pub fn minus(self, other: &RootSum) -> Self {
        self.plus(&other.scaled(&-BigRational::one()))
    }

    /// Enclosure in which every root term is pinned to width
    /// `2^{-bits} · min(1, |term|)`.
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        if self.roots.is_empty() {
            return Enclosure::exact(self.exact.clone());
        }
        let scales: Vec<u64> = self
            .roots
            .iter()
            .map(|r| bits as u64 + (-r.log2_floor).max(0) as u64)
            .collect();
        let top = *scales.iter().max().expect("nonempty");
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (root, &scale) in self.roots.iter().zip(&scales) {
            let r = BigInt::from(root.scaled_floor(scale));
            let shift = top - scale;
            let (l, h) = if root.negative { (-(&r + 1u32), -r) } else { (r.clone(), r + 1u32) };
            lo += l << shift;
            hi += h << shift;
        }
        Enclosure {
            lo: add_dyadic(&self.exact, lo, top),
            hi: add_dyadic(&self.exact, hi, top),
            precision_bits: bits,
        }
    }

    /// Refines the enclosure by doubling precision until `decide` returns a
    /// value or the cap is exhausted.
    pub fn decide<T>(
        &self,
        prec: Precision,
        what: impl FnOnce() -> String,
        mut decide: impl FnMut(&Enclosure) -> Option<T>,
    ) -> Result<T, EvalError> {
        if self.is_exact() {
            if let Some(v) = decide(&Enclosure::exact(self.exact.clone())) {
                return Ok(v);
            }
            return Err(EvalError::Undecidable {
                what: what(),
                cap: prec.cap_bits,
            });
        }
        let mut bits = prec.start_bits.max(1).min(prec.cap_bits);
        loop {
            if let Some(v) = decide(&self.enclosure(bits)) {
                return Ok(v);
            }
            if bits >= prec.cap_bits {
                return Err(EvalError::Undecidable {
                    what: what(),
                    cap: prec.cap_bits,
                });
            }
            bits = bits.saturating_mul(2).min(prec.cap_bits);
        }
    }

    pub fn floor(&self, prec: Precision) -> Result<(BigInt, Enclosure), EvalError> {
        self.decide(prec, || "floor".to_string(), |e| e.floor().map(|f| (f, e.clone())))
    }

    pub fn cmp_rational(&self, q: &BigRational, prec: Precision) -> Result<Ordering, EvalError> {
        self.decide(prec, || format!("comparison with {q}"), |e| e.cmp_rational(q))
    }

    /// True iff the value lies strictly inside `(lo, hi)`.
    pub fn strictly_within(&self, lo: &BigRational, hi: &BigRational, prec: Precision) -> Result<bool, EvalError> {
        Ok(self.cmp_rational(lo, prec)? == Ordering::Greater && self.cmp_rational(hi, prec)? == Ordering::Less)
    }
}

/// Integer part and fractional-part enclosure of `f^{(order)}(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FloorFrac {
    #[serde(serialize_with = "crate::json::display")]
    pub floor_part: BigInt,
    pub frac: Enclosure,
    /// The value is an exact rational.
    pub exact: bool,
}

/// Enclosure of `f(x)` with width at most `2^{-precision_bits} · max(1, |f(x)|)`.
pub fn eval_enclosure(f: &PowerSumExpr, x: &BigInt, precision_bits: u32, cap_bits: u32) -> Result<Enclosure, EvalError> {
    if precision_bits > cap_bits {
        return Err(EvalError::PrecisionCap {
            requested: precision_bits,
            cap: cap_bits,
        });
    }
    let value = RootSum::point(f, x)?;
    // T terms of width ≤ 2^{-bits} each.
    let guard = usize::BITS - f.terms().len().leading_zeros() + 1;
    Ok(value.enclosure(precision_bits + guard))
}

/// Exact floor and fractional-part enclosure of `f^{(order)}(x)`.
pub fn floor_frac(f: &PowerSumExpr, x: &BigInt, order: u32, prec: Precision) -> Result<FloorFrac, EvalError> {
    let value = RootSum::point(&f.differentiate(order), x)?;
    floor_frac_value(&value, prec).map_err(|e| match e {
        EvalError::Undecidable { cap, .. } => EvalError::Undecidable {
            what: format!("floor of f^({order})({x})"),
            cap,
        },
        other => other,
    })
}

/// Exact floor and fractional-part enclosure of an already prepared value.
pub fn floor_frac_value(value: &RootSum, prec: Precision) -> Result<FloorFrac, EvalError> {
    let (floor_part, enclosure) = value.floor(prec)?;
    let shift = -BigRational::from_integer(floor_part.clone());
    let mut frac = enclosure.shifted(&shift);
    // The floor decision guarantees the true value lies in [0, 1).
    if frac.lo.is_negative() {
        frac.lo = BigRational::zero();
    }
    Ok(FloorFrac {
        floor_part,
        frac,
        exact: value.is_exact(),
    })
}

/// Sign of `f^{(order)}(x) − q`.
pub fn compare_value(
    f: &PowerSumExpr,
    x: &BigInt,
    order: u32,
    q: &BigRational,
    prec: Precision,
) -> Result<Ordering, EvalError> {
    RootSum::point(&f.differentiate(order), x)?.cmp_rational(q, prec)
}

/// Enclosure of the term-wise majorant `Σ_j max_{[a,b]} |c_j e_j^{(k)} x^{e_j−k}|`,
/// whose upper end bounds `sup_{[a,b]} |f^{(k)}|`.
pub fn sup_abs_derivative(f: &PowerSumExpr, k: u32, a: &BigInt, b: &BigInt, bits: u32) -> Result<Enclosure, EvalError> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(RootSum::abs_majorant(&f.differentiate(k), lo, hi)?.enclosure(bits))
}

/// Outcome of checking the Lagrange form of Taylor's theorem at one point.
#[derive(Clone, Debug, Serialize)]
pub struct TaylorCheck {
    pub holds: bool,
    /// `f(n+h) − Σ_{i<k} h^i/i! · f^{(i)}(n)`.
    pub residual: Enclosure,
    /// `h^k/k! · sup_{[n,n+h]} |f^{(k)}|` (majorant).
    pub bound: Enclosure,
}

/// Checks `|f(n+h) − Σ_{i<k} h^i/i!·f^{(i)}(n)| ≤ h^k/k!·sup_{[n,n+h]}|f^{(k)}|`.
pub fn taylor_residual_check(
    f: &PowerSumExpr,
    n: &BigInt,
    h: u64,
    k: u32,
    prec: Precision,
) -> Result<TaylorCheck, EvalError> {
    let end = n + BigInt::from(h);
    let mut residual = RootSum::point(f, &end)?;
    let hq = BigRational::from_integer(h.into());
    let mut weight = BigRational::one();
    for i in 0..k {
        if i > 0 {
            weight = weight * &hq / BigRational::from_integer(i.into());
        }
        let term = RootSum::point(&f.differentiate(i), n)?;
        residual = residual.minus(&term.scaled(&weight));
    }
    weight = weight * &hq / BigRational::from_integer(k.max(1).into());
    let bound = RootSum::abs_majorant(&f.differentiate(k), n, &end)?.scaled(&weight);

    let mut bits = prec.start_bits.max(1).min(prec.cap_bits);
    loop {
        let r = residual.enclosure(bits);
        let b = bound.enclosure(bits);
        if r.abs_upper() <= *b.hi() {
            return Ok(TaylorCheck {
                holds: true,
                residual: r,
                bound: b,
            });
        }
        if r.abs_lower() > *b.hi() {
            return Ok(TaylorCheck {
                holds: false,
                residual: r,
                bound: b,
            });
        }
        if bits >= prec.cap_bits || (residual.is_exact() && bound.is_exact()) {
            return Err(EvalError::Undecidable {
                what: "Taylor residual comparison".into(),
                cap: prec.cap_bits,
            });
        }
        bits = bits.saturating_mul(2).min(prec.cap_bits);
    }
}
