//! Sufficient conditions for a k-wise coprime window at a point `n`, and an
//! independent check of the conclusion.
//!
//! With `F_i = ⌊f^{(i)}(n)⌋`, the conditions are
//!
//! * c0: `1/4^{4k} < {f(n)} < 1/4`;
//! * c1: `{f^{(i)}(n)} < 1/(4H^i)` for `1 ≤ i < k` and
//!   `sup_{[n,n+H]} |f^{(k)}| < 1/(4^{4k} H^k)`;
//! * c2: `F_i ≡ 0 (mod k!·Π_H)` for `1 ≤ i < k`;
//! * c3: `gcd(F_0, F_ℓ) = 1` for some `1 ≤ ℓ < k`.
//!
//! Under c0–c2 the window floors are `⌊f(n+h)⌋ = Σ_{i<k} h^i/i!·F_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::cmp::Ordering;

use crate::arith::{
    factorial, kwise_coprime, ladder_modulus, small_prime_divisor, smallest_prime_factor, vandermonde,
};
use crate::powersum::PowerSumExpr;
use crate::rigor::{floor_frac, floor_frac_value, Enclosure, Precision, RootSum};
use crate::{Error, Result};

/// Schema tag written into every serialized verification report.
pub const REPORT_SCHEMA: &str = "kwise.verification/1";

/// Trial-division bound used when naming a prime in the Vandermonde diagnostic.
const DIAGNOSTIC_PRIME_BOUND: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowCertificate {
    #[serde(serialize_with = "crate::json::display")]
    pub f: PowerSumExpr,
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u64,
    /// `⌊f^{(i)}(n)⌋` for `0 ≤ i < k`.
    #[serde(serialize_with = "crate::json::vec_display")]
    pub floors: Vec<BigInt>,
    /// Fractional parts `{f^{(i)}(n)}`.
    pub frac_bounds: Vec<Enclosure>,
    /// Majorant of `sup_{[n,n+H]} |f^{(k)}|`.
    pub kth_bound: Enclosure,
    pub ell: Option<u32>,
    pub c0: bool,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    /// The k-th derivative bound also holds with `4^{6k}` in place of `4^{4k}`.
    pub kth_bound_strong: bool,
}

impl WindowCertificate {
    pub fn all_true(&self) -> bool {
        self.c0 && self.c1 && self.c2 && self.c3
    }

    /// Names of the conditions that fail.
    pub fn failed_conditions(&self) -> Vec<&'static str> {
        [("c0", self.c0), ("c1", self.c1), ("c2", self.c2), ("c3", self.c3)]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name)
            .collect()
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn inv_pow4(e: u32, h: u64, hk: u32) -> BigRational {
    // 1 / (4^e · H^hk)
    let denom = num_traits::pow(BigInt::from(4), e as usize) * num_traits::pow(BigInt::from(h), hk as usize);
    BigRational::new(BigInt::one(), denom)
}

pub(crate) fn validate_window(k: u32, h: u64) -> Result<()> {
    if k < 2 || (k as u64) > h {
        return Err(Error::InvalidInput(format!("need 2 <= k <= H, got k = {k}, H = {h}")));
    }
    Ok(())
}

/// Decides the four conditions at `n`.
pub fn check_conditions(f: &PowerSumExpr, n: &BigInt, k: u32, h: u64, prec: Precision) -> Result<WindowCertificate> {
    validate_window(k, h)?;
    let mut floors = Vec::with_capacity(k as usize);
    let mut frac_bounds = Vec::with_capacity(k as usize);
    let mut c0 = false;
    let mut c1 = true;
    for i in 0..k {
        let value = RootSum::point(&f.differentiate(i), n)?;
        let ff = floor_frac_value(&value, prec).map_err(|e| relabel(e, || format!("floor of f^({i})({n})")))?;
        let base = rat(ff.floor_part.clone());
        if i == 0 {
            let lo = &base + inv_pow4(4 * k, 1, 0);
            let hi = &base + BigRational::new(BigInt::one(), BigInt::from(4));
            c0 = value.strictly_within(&lo, &hi, prec)?;
        } else {
            let hi = &base + inv_pow4(1, h, i);
            c1 &= value.cmp_rational(&hi, prec)? == Ordering::Less;
        }
        floors.push(ff.floor_part);
        frac_bounds.push(ff.frac);
    }

    let end = n + BigInt::from(h);
    let majorant = RootSum::abs_majorant(&f.differentiate(k), n, &end)?;
    let threshold = inv_pow4(4 * k, h, k);
    let strong_threshold = inv_pow4(6 * k, h, k);
    let (below, kth_bound) = majorant.decide(
        prec,
        || format!("sup |f^({k})| on [{n}, {end}]"),
        |e| e.cmp_rational(&threshold).map(|o| (o == Ordering::Less, e.clone())),
    )?;
    c1 &= below;
    let kth_bound_strong = majorant.cmp_rational(&strong_threshold, prec)? == Ordering::Less;

    let modulus = ladder_modulus(k, h);
    let c2 = floors[1..].iter().all(|v| v.is_multiple_of(&modulus));
    let ell = (1..k).find(|&i| floors[0].gcd(&floors[i as usize]).is_one());

    Ok(WindowCertificate {
        f: f.clone(),
        n: n.clone(),
        k,
        h,
        floors,
        frac_bounds,
        kth_bound,
        ell,
        c0,
        c1,
        c2,
        c3: ell.is_some(),
        kth_bound_strong,
    })
}

fn relabel(e: crate::rigor::EvalError, what: impl FnOnce() -> String) -> crate::rigor::EvalError {
    match e {
        crate::rigor::EvalError::Undecidable { cap, .. } => crate::rigor::EvalError::Undecidable { what: what(), cap },
        other => other,
    }
}

/// `Σ_{i<k} h^i/i!·floors[i]` without any precondition.
pub(crate) fn taylor_floor(cert: &WindowCertificate, h: u64) -> BigRational {
    let hq = rat(h);
    let mut weight = BigRational::one();
    let mut total = BigRational::zero();
    for (i, floor) in cert.floors.iter().enumerate() {
        if i > 0 {
            weight = weight * &hq / rat(i as u64);
        }
        total += &weight * rat(floor.clone());
    }
    total
}

/// `⌊f(n+h)⌋` read off the certificate, for `1 ≤ h ≤ H`.
pub fn reconstruct_window(cert: &WindowCertificate, h: u64) -> Result<BigInt> {
    if !(cert.c0 && cert.c1 && cert.c2) {
        let failed: Vec<_> = cert.failed_conditions().into_iter().filter(|c| *c != "c3").collect();
        return Err(Error::CertificateInvalid(failed.join(", ")));
    }
    if h == 0 || h > cert.h {
        return Err(Error::InvalidInput(format!("offset h = {h} outside [1, {}]", cert.h)));
    }
    let value = taylor_floor(cert, h);
    if !value.is_integer() {
        return Err(Error::InternalContradiction(format!(
            "reconstructed floor at h = {h} is not an integer: {value}"
        )));
    }
    Ok(value.to_integer())
}

/// Condition flags as they appear in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionFlags {
    pub c0: bool,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub ell: Option<u32>,
    pub kth_bound_strong: bool,
}

/// Vandermonde analysis of one k-subset of the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VandermondeDiagnostic {
    /// Offsets `h` of the subset.
    pub nodes: Vec<i64>,
    #[serde(serialize_with = "crate::json::display")]
    pub subset_gcd: BigInt,
    /// Smallest prime dividing `subset_gcd`, when found by trial division.
    pub prime: Option<u64>,
    pub prime_exceeds_h: Option<bool>,
    #[serde(serialize_with = "crate::json::display")]
    pub det: BigInt,
    pub prime_divides_det: Option<bool>,
    /// `det·V^{-1}·(window floors)` equals `det·F_i/i!` for every `i`.
    pub back_solve_consistent: bool,
    /// `p ∤ det` together with the back-solve forces `p | F_i` for every `i`.
    pub prime_divides_all_floors: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    #[serde(serialize_with = "crate::json::display")]
    pub f: PowerSumExpr,
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u64,
    /// Direct `⌊f(n+h)⌋` for `h = 1..=H`.
    #[serde(serialize_with = "crate::json::vec_display")]
    pub floors: Vec<BigInt>,
    pub flags: ConditionFlags,
    #[serde(skip)]
    pub certificate: WindowCertificate,
    /// Present when c0–c2 hold.
    pub reconstruction_matches: Option<bool>,
    pub kwise_coprime: bool,
    /// Offsets `h` of the first k-subset with a common factor.
    pub failing_subset: Option<Vec<u64>>,
    pub small_prime_ok: bool,
    /// `(prime, h)` for the first window floor divisible by a prime `≤ H`.
    pub small_prime_witness: Option<(u64, u64)>,
    pub diagnostics: Option<VandermondeDiagnostic>,
}

impl VerificationReport {
    /// The conclusion holds and agrees with the certificate whenever the
    /// certificate is fully satisfied.
    pub fn consistent(&self) -> bool {
        !self.certificate.all_true() || (self.kwise_coprime && self.reconstruction_matches == Some(true) && self.small_prime_ok)
    }
}

/// Direct floors `⌊f(n+h)⌋` for `h = 1..=H`.
pub fn window_floors(f: &PowerSumExpr, n: &BigInt, h: u64, prec: Precision) -> Result<Vec<BigInt>> {
    (1..=h)
        .map(|j| Ok(floor_frac(f, &(n + BigInt::from(j)), 0, prec)?.floor_part))
        .collect()
}

/// Recomputes the window directly and compares it with the certificate.
pub fn verify_window(f: &PowerSumExpr, n: &BigInt, k: u32, h: u64, prec: Precision) -> Result<VerificationReport> {
    validate_window(k, h)?;
    let floors = window_floors(f, n, h, prec)?;
    let certificate = check_conditions(f, n, k, h, prec)?;
    let reconstruction_matches = (certificate.c0 && certificate.c1 && certificate.c2).then(|| {
        floors
            .iter()
            .zip(1..=h)
            .all(|(direct, j)| reconstruct_window(&certificate, j).map(|v| &v == direct).unwrap_or(false))
    });
    let outcome = kwise_coprime(&floors, k as usize);
    let failing_subset: Option<Vec<u64>> = outcome
        .failing_subset
        .as_ref()
        .map(|s| s.iter().map(|&i| i as u64 + 1).collect());
    let small_prime_witness = small_prime_divisor(&floors, h).map(|(p, i)| (p, i as u64 + 1));
    let subset: Vec<u64> = failing_subset.clone().unwrap_or_else(|| (1..=k as u64).collect());
    let diagnostics = Some(vandermonde_diagnostic(&certificate, &floors, &subset)?);

    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        f: f.clone(),
        n: n.clone(),
        k,
        h,
        floors,
        flags: ConditionFlags {
            c0: certificate.c0,
            c1: certificate.c1,
            c2: certificate.c2,
            c3: certificate.c3,
            ell: certificate.ell,
            kth_bound_strong: certificate.kth_bound_strong,
        },
        certificate,
        reconstruction_matches,
        kwise_coprime: outcome.coprime,
        failing_subset,
        small_prime_ok: small_prime_witness.is_none(),
        small_prime_witness,
        diagnostics,
    })
}

/// Solves the Vandermonde system on the given offsets and reports how a
/// common prime factor of the subset interacts with `det(V)`.
pub fn vandermonde_diagnostic(
    cert: &WindowCertificate,
    window: &[BigInt],
    offsets: &[u64],
) -> Result<VandermondeDiagnostic> {
    let nodes: Vec<i64> = offsets.iter().map(|&h| h as i64).collect();
    let system = vandermonde(&nodes)?;
    let rhs: Vec<BigInt> = offsets.iter().map(|&h| window[(h - 1) as usize].clone()).collect();
    let subset_gcd = rhs.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let solved = system.scaled_solve(&rhs);
    let back_solve_consistent = solved.iter().enumerate().all(|(i, s)| {
        let expected = rat(system.det.clone()) * rat(cert.floors[i].clone()) / rat(factorial(i as u64));
        rat(s.clone()) == expected
    });
    let prime = smallest_prime_factor(&subset_gcd, DIAGNOSTIC_PRIME_BOUND);
    let prime_divides_det = prime.map(|p| system.det.is_multiple_of(&BigInt::from(p)));
    let prime_divides_all_floors = prime.map(|p| cert.floors.iter().all(|v| v.is_multiple_of(&BigInt::from(p))));
    Ok(VandermondeDiagnostic {
        nodes,
        subset_gcd,
        prime,
        prime_exceeds_h: prime.map(|p| p > cert.h),
        det: system.det,
        prime_divides_det,
        back_solve_consistent,
        prime_divides_all_floors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powersum::parse_function;

    fn synthetic() -> PowerSumExpr {
        parse_function("4*x + 1 + x/2^20").unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn synthetic_certificate_passes() {
        let cert = check_conditions(&synthetic(), &big(1024), 2, 2, Precision::default()).unwrap();
        assert!(cert.all_true(), "{cert:?}");
        assert_eq!(cert.floors, vec![big(4097), big(4)]);
        assert_eq!(cert.ell, Some(1));
        assert_eq!(cert.frac_bounds[0].lo(), &BigRational::new(1.into(), 1024.into()));
        assert!(cert.kth_bound.is_exact());
    }

    #[test]
    fn synthetic_fails_c0_at_one() {
        let cert = check_conditions(&synthetic(), &big(1), 2, 2, Precision::default()).unwrap();
        assert!(!cert.c0);
        assert_eq!(cert.floors[0], big(5));
    }

    #[test]
    fn sqrt_derivative_fails_c2() {
        let f = parse_function("x^(3/2)").unwrap();
        let cert = check_conditions(&f, &big(5), 2, 4, Precision::default()).unwrap();
        assert_eq!(cert.floors[1], big(3));
        assert!(!cert.c2);
    }

    #[test]
    fn reconstruct_examples() {
        let cert = check_conditions(&synthetic(), &big(1024), 2, 2, Precision::default()).unwrap();
        assert_eq!(reconstruct_window(&cert, 1).unwrap(), big(4101));
        assert_eq!(reconstruct_window(&cert, 2).unwrap(), big(4105));
        assert_eq!(taylor_floor(&cert, 0), rat(4097));
        assert!(matches!(reconstruct_window(&cert, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(reconstruct_window(&cert, 3), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn reconstruct_rejects_false_flags() {
        let cert = check_conditions(&synthetic(), &big(1), 2, 2, Precision::default()).unwrap();
        assert!(matches!(reconstruct_window(&cert, 1), Err(Error::CertificateInvalid(_))));
    }

    #[test]
    fn verify_examples() {
        let report = verify_window(&synthetic(), &big(1024), 2, 2, Precision::default()).unwrap();
        assert_eq!(report.floors, vec![big(4101), big(4105)]);
        assert_eq!(report.reconstruction_matches, Some(true));
        assert!(report.kwise_coprime && report.small_prime_ok && report.consistent());

        let f = parse_function("x^(3/2)").unwrap();
        let report = verify_window(&f, &big(2), 2, 3, Precision::default()).unwrap();
        assert_eq!(report.floors, vec![big(5), big(8), big(11)]);
        assert!(report.kwise_coprime);

        let f = parse_function("x^2 + 1/x").unwrap();
        let report = verify_window(&f, &big(5), 2, 4, Precision::default()).unwrap();
        assert_eq!(report.floors, vec![big(36), big(49), big(64), big(81)]);
        assert!(!report.kwise_coprime);
        assert_eq!(report.failing_subset, Some(vec![1, 3]));
        let diag = report.diagnostics.unwrap();
        assert_eq!(diag.prime, Some(2));
        assert_eq!(diag.prime_exceeds_h, Some(false));
    }

    #[test]
    fn report_json_shape() {
        let report = verify_window(&synthetic(), &big(1024), 2, 2, Precision::default()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for key in ["n", "k", "H", "floors", "flags", "failing_subset", "diagnostics"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["floors"][0], "4101");
    }

    #[test]
    fn rejects_bad_window() {
        assert!(check_conditions(&synthetic(), &big(1024), 3, 2, Precision::default()).is_err());
        assert!(check_conditions(&synthetic(), &big(1024), 1, 2, Precision::default()).is_err());
    }
}
