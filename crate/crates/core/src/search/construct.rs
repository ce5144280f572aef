//! Constructive descent: seed the top derivative, then localize one lower
//! order per step until every `f^{(i)}(n_0)` sits in a prescribed residue
//! class with a small fractional part.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;

use crate::arith::{factorial, primorial};
use crate::certificate::{check_conditions, WindowCertificate};
use crate::powersum::{check_hypotheses, iroot, PowerSumExpr, Term};
use crate::rigor::{floor_frac_value, Enclosure, Precision, RootSum};
use crate::search::ladder::{build_constants, ConstantLadder, StageConstants};
use crate::{Error, Result};

/// Number of evenly spaced increment probes taken on top of the ones the
/// binary search visits.
const EXTRA_INCREMENT_PROBES: u64 = 4;

fn q(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

fn contradiction(msg: String) -> Error {
    Error::InternalContradiction(msg)
}

/// Least integer `x ≥ 1` such that every `y ≥ x` has `y^{p/q} > √v2`,
/// where `v2 ≥ 0` is rational and `p/q > 0`. Solved exactly: `y^{2p} > v2^q`.
fn power_threshold(v2: &BigRational, exponent: &crate::powersum::Exponent) -> BigInt {
    let (p, qd) = (*exponent.numer() as u32, *exponent.denom() as u32);
    let rhs = Pow::pow(v2, qd);
    let ceil = rhs.ceil().to_integer();
    if ceil <= BigInt::zero() {
        return BigInt::one();
    }
    let root = iroot(ceil.magnitude(), 2 * p);
    BigInt::from(root) + 1
}

/// Point beyond which `|f^{(k)}| < 1/D_k` and `f^{(k)} > 0`, both read off
/// term by term in exact arithmetic.
pub fn dominance_point(f: &PowerSumExpr, k: u32, d_k: &BigInt) -> Result<BigInt> {
    let g = f.differentiate(k);
    let terms = g.terms();
    let Some(lead) = terms.first() else {
        return Err(contradiction(format!("f^({k}) vanishes identically")));
    };
    if !lead.coefficient.is_positive() || !lead.exponent.is_negative() {
        return Err(Error::Hypothesis {
            k,
            vanishing: lead.exponent.is_negative(),
            unbounded: lead.coefficient.is_positive(),
        });
    }
    let count = BigRational::from_integer(terms.len().into());
    let abs2 = |t: &Term| t.coefficient.abs_pow(2);
    let mut x0 = BigInt::from(2);
    // |c_j| x^{e_j} < 1/(T D_k)  ⇔  x^{−e_j} > T D_k |c_j|
    let scale2 = Pow::pow(&count * q(d_k), 2u32);
    for t in terms {
        x0 = x0.max(power_threshold(&(&scale2 * abs2(t)), &-t.exponent));
    }
    // lead·x^{e_0} > (T−1)·|c_j| x^{e_j}  ⇔  x^{e_0−e_j} > (T−1)|c_j|/lead
    let others = BigRational::from_integer((terms.len() - 1).into());
    let lead2 = abs2(lead);
    for t in &terms[1..] {
        let ratio2 = Pow::pow(&others, 2u32) * abs2(t) / &lead2;
        x0 = x0.max(power_threshold(&ratio2, &(lead.exponent - t.exponent)));
    }
    Ok(x0)
}

/// Seeding of the top order `k − 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SeedResult {
    /// Point beyond which `|f^{(k)}| < 1/D_k` and `f^{(k−1)}` increases.
    #[serde(serialize_with = "crate::json::display")]
    pub x0: BigInt,
    /// `s` in `⌊f^{(k−1)}(n_{k−1})⌋ = (k!)^s Π_H`.
    pub s_exponent: u32,
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub floor: BigInt,
    pub frac: Enclosure,
}

/// Finds the least `s ≥ 1` and the least integer `n_{k−1} ≥ x_start` with
/// `f^{(k−1)}(n_{k−1}) > (k!)^s Π_H + 1/(2 D_{k−1})`, and verifies that
/// `⌊f^{(k−1)}(n_{k−1})⌋ = (k!)^s Π_H` with fractional part in
/// `(1/C_{k−1}, 1/D_{k−1})`.
pub fn seed_top_level(
    f: &PowerSumExpr,
    ladder: &ConstantLadder,
    min_n: Option<&BigInt>,
    prec: Precision,
) -> Result<SeedResult> {
    let k = ladder.k;
    let hyp = check_hypotheses(f, k);
    if !hyp.admissible() {
        return Err(Error::Hypothesis {
            k,
            vanishing: hyp.vanishing_kth,
            unbounded: hyp.unbounded_k_minus_1,
        });
    }
    let ku = k as usize;
    let x0 = dominance_point(f, k, &ladder.d[ku])?;
    let start = match min_n {
        Some(n) if n > &x0 => n.clone(),
        _ => x0.clone(),
    };
    let g = f.differentiate(k - 1);
    let at = |x: &BigInt| RootSum::point(&g, x).map_err(Error::from);

    let kfact = factorial(k as u64);
    let pi = primorial(ladder.h);
    let offset = BigRational::new(BigInt::one(), BigInt::from(2) * &ladder.d[ku - 1]);
    let start_value = at(&start)?;
    let rough = start_value.enclosure(prec.start_bits);
    let mut s = 1u32;
    let mut base = &kfact * &pi;
    let target = loop {
        let y = q(&base) + &offset;
        if &y > rough.hi() || (&y >= rough.lo() && start_value.cmp_rational(&y, prec)? == Ordering::Greater) {
            break y;
        }
        s += 1;
        base *= &kfact;
    };

    // Least n ≥ start with g(n) > target: g(start) < target and g increases.
    let above = |x: &BigInt| -> Result<bool> { Ok(at(x)?.cmp_rational(&target, prec)? == Ordering::Greater) };
    let mut lo = start.clone();
    let mut step = BigInt::one();
    let mut hi = &start + &step;
    while !above(&hi)? {
        lo = hi;
        step <<= 1;
        hi = &start + &step;
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if above(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n = hi;
    let value = at(&n)?;
    let ff = floor_frac_value(&value, prec)?;
    let c_top = q(&ladder.c[ku - 1]).recip();
    let d_top = q(&ladder.d[ku - 1]).recip();
    let base_q = q(&base);
    if ff.floor_part != base || !value.strictly_within(&(&base_q + c_top), &(&base_q + d_top), prec)? {
        return Err(contradiction(format!(
            "seed at n = {n} has f^({}) floor {} frac {}, expected floor {base}",
            k - 1,
            ff.floor_part,
            ff.frac
        )));
    }
    Ok(SeedResult {
        x0,
        s_exponent: s,
        n,
        floor: ff.floor_part,
        frac: ff.frac,
    })
}

/// Orders `m..k−1` localized at `n0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderState {
    pub m: u32,
    #[serde(serialize_with = "crate::json::display")]
    pub n0: BigInt,
    /// `v_i` for `i = m..k−1`.
    #[serde(serialize_with = "crate::json::vec_display")]
    pub residues: Vec<BigInt>,
}

impl LadderState {
    pub fn residue(&self, i: u32) -> &BigInt {
        &self.residues[(i - self.m) as usize]
    }
}

/// One sampled increment `a_{h+1} − a_h`.
#[derive(Clone, Debug, Serialize)]
pub struct IncrementSample {
    #[serde(serialize_with = "crate::json::display")]
    pub h: BigInt,
    pub value: Enclosure,
}

/// One evaluated `a_h` from the search.
#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    #[serde(serialize_with = "crate::json::display")]
    pub h: BigInt,
    pub value: Enclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderTrace {
    pub m: u32,
    #[serde(rename = "R", serialize_with = "crate::json::display")]
    pub r_len: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub b: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub r: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub r0: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub t: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub s: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub n0: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub n1: BigInt,
    pub increments: Vec<IncrementSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<Probe>>,
}

/// `a_h = f^{(m−1)}(n_0+h) − Σ_{i=1}^{k−m} h^i/i!·F_{m+i−1}`.
struct Walk<'a> {
    g: PowerSumExpr,
    n0: &'a BigInt,
    floors: Vec<BigInt>,
}

impl Walk<'_> {
    fn at(&self, h: &BigInt) -> Result<RootSum> {
        let hq = q(h);
        let mut weight = BigRational::one();
        let mut poly = BigRational::zero();
        for (i, floor) in self.floors.iter().enumerate() {
            weight = weight * &hq / BigRational::from_integer((i + 1).into());
            poly += &weight * q(floor);
        }
        Ok(RootSum::point(&self.g, &(self.n0 + h))?.add_rational(&-poly))
    }
}

/// Checks that `⌊f^{(i)}(n)⌋ ≡ v_i` and `{f^{(i)}(n)} ∈ (lo_i, hi_i)` for
/// `i = m..k−1`; returns the floors.
fn verify_localization(
    f: &PowerSumExpr,
    n: &BigInt,
    m: u32,
    residues: &[BigInt],
    modulus: &BigInt,
    bounds: impl Fn(u32) -> (BigRational, BigRational),
    prec: Precision,
) -> Result<std::result::Result<Vec<BigInt>, String>> {
    let mut floors = Vec::new();
    for (offset, v) in residues.iter().enumerate() {
        let i = m + offset as u32;
        let value = RootSum::point(&f.differentiate(i), n)?;
        let ff = floor_frac_value(&value, prec)?;
        if !(&ff.floor_part - v).is_multiple_of(modulus) {
            return Ok(Err(format!("floor of f^({i})({n}) = {} is not {v} mod {modulus}", ff.floor_part)));
        }
        let (lo, hi) = bounds(i);
        let base = q(&ff.floor_part);
        if !value.strictly_within(&(&base + &lo), &(&base + &hi), prec)? {
            return Ok(Err(format!("fractional part of f^({i})({n}) = {} outside ({lo}, {hi})", ff.frac)));
        }
        floors.push(ff.floor_part);
    }
    Ok(Ok(floors))
}

/// Search for the least `r ∈ (0, R]` with `a_r ≥ b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StepSearch {
    #[default]
    Binary,
    /// Walks `h = 1, 2, …`; only sensible for small `R`.
    Linear,
}

#[derive(Clone, Debug, Default)]
pub struct StepOptions {
    pub search: StepSearch,
    /// Record every evaluated `a_h`.
    pub trace: bool,
}

/// Descends from order `m` to `m − 1`, targeting `⌊f^{(m−1)}⌋ ≡ target`.
pub fn ladder_step(
    f: &PowerSumExpr,
    state: &LadderState,
    target: &BigInt,
    ladder: &ConstantLadder,
    prec: Precision,
    options: &StepOptions,
) -> Result<(LadderState, LadderTrace)> {
    let k = ladder.k;
    let m = state.m;
    if m == 0 || m >= k || state.residues.len() != (k - m) as usize {
        return Err(Error::InvalidInput(format!("ladder state at order {m} does not fit k = {k}")));
    }
    let t = k - m;
    let violations = ladder.stage_violations(t);
    if !violations.is_empty() {
        return Err(Error::Inadmissible(violations));
    }
    let stage: StageConstants = ladder.stage(t);
    let modulus = ladder.modulus();
    let a = |i: u32| q(&stage.a[i as usize]);
    let b = |i: u32| stage.b[i as usize].clone();

    let floors = verify_localization(
        f,
        &state.n0,
        m,
        &state.residues,
        &modulus,
        |i| (a(i).recip(), b(i).recip()),
        prec,
    )?
    .map_err(|e| Error::InvalidInput(format!("ladder state does not hold: {e}")))?;

    let walk = Walk {
        g: f.differentiate(m - 1),
        n0: &state.n0,
        floors,
    };
    let r_len = BigInt::from(2) * &modulus * &stage.a[m as usize];
    let mut probes = options.trace.then(Vec::new);
    let mut record = |h: &BigInt, v: &RootSum| {
        if let Some(p) = probes.as_mut() {
            p.push(Probe {
                h: h.clone(),
                value: v.enclosure(prec.start_bits),
            });
        }
    };

    let a0 = walk.at(&BigInt::zero())?;
    record(&BigInt::zero(), &a0);
    let (a0_floor, _) = a0.floor(prec)?;
    let first = &a0_floor + 1;
    let gap: BigInt = target - &first;
    let b_target = &first + gap.mod_floor(&modulus);
    let b_q = q(&b_target);
    let a_r = walk.at(&r_len)?;
    record(&r_len, &a_r);
    if a_r.cmp_rational(&b_q, prec)? != Ordering::Greater {
        return Err(contradiction(format!(
            "no b = {b_target} inside (a_0, a_R) at n0 = {}, order {}",
            state.n0,
            m - 1
        )));
    }

    let low_inc = (BigRational::from_integer(3.into()) * a(m)).recip();
    let high_inc = BigRational::from_integer(3.into()) / b(m);
    let mut increments: Vec<IncrementSample> = Vec::new();
    let mut check_increment = |h: &BigInt, here: Option<&RootSum>| -> Result<()> {
        if increments.iter().any(|s| &s.h == h) {
            return Ok(());
        }
        let here = match here {
            Some(v) => v.clone(),
            None => walk.at(h)?,
        };
        let next = walk.at(&(h + 1))?;
        let diff = next.minus(&here);
        // Refine until the enclosure sits strictly inside the band or clearly
        // leaves it; the stored enclosure is the deciding one.
        let (inside, value) = diff.decide(
            prec,
            || format!("increment at h = {h}"),
            |e| {
                if e.lo() > &low_inc && e.hi() < &high_inc {
                    Some((true, e.clone()))
                } else if e.hi() <= &low_inc || e.lo() >= &high_inc || e.is_exact() {
                    Some((false, e.clone()))
                } else {
                    None
                }
            },
        )?;
        if !inside {
            return Err(contradiction(format!(
                "increment a_{{h+1}} - a_h at h = {h} is {value} outside ({low_inc}, {high_inc})"
            )));
        }
        increments.push(IncrementSample { h: h.clone(), value });
        Ok(())
    };

    let reaches = |v: &RootSum| -> Result<bool> { Ok(v.cmp_rational(&b_q, prec)? != Ordering::Less) };
    let r = match options.search {
        StepSearch::Binary => {
            let mut lo = BigInt::zero();
            let mut hi = r_len.clone();
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) >> 1;
                let v = walk.at(&mid)?;
                record(&mid, &v);
                check_increment(&mid, Some(&v))?;
                if reaches(&v)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
        StepSearch::Linear => {
            let mut h = BigInt::one();
            loop {
                let v = walk.at(&h)?;
                record(&h, &v);
                if reaches(&v)? {
                    break h;
                }
                h += 1;
            }
        }
    };
    let last: BigInt = &r_len - 1;
    let mut sample_points = vec![BigInt::zero(), &r - 1u32, last.clone()];
    for j in 1..=EXTRA_INCREMENT_PROBES {
        sample_points.push(&last * j / (EXTRA_INCREMENT_PROBES + 1));
    }
    for h in sample_points {
        check_increment(&h, None)?;
    }
    increments.sort_by(|x, y| x.h.cmp(&y.h));

    let r0 = r.mod_floor(&modulus);
    let ratio = BigRational::from_integer(4.into()) * a(m) / (q(&modulus) * a(m - 1));
    let t_shift = (ratio.floor().to_integer() + 1) * &modulus - &r0;
    let s = &r + &t_shift;
    let n1 = &state.n0 + &s;

    let mut residues = Vec::with_capacity(state.residues.len() + 1);
    residues.push(target.clone());
    residues.extend(state.residues.iter().cloned());
    let two = BigRational::from_integer(2.into());
    verify_localization(
        f,
        &n1,
        m - 1,
        &residues,
        &modulus,
        |i| ((&two * a(i)).recip(), &two / b(i)),
        prec,
    )?
    .map_err(|e| contradiction(format!("step from order {m} failed its conclusion: {e}")))?;

    let trace = LadderTrace {
        m,
        r_len,
        b: b_target,
        r,
        r0,
        t: t_shift,
        s,
        n0: state.n0.clone(),
        n1: n1.clone(),
        increments,
        probes,
    };
    Ok((
        LadderState {
            m: m - 1,
            n0: n1,
            residues,
        },
        trace,
    ))
}

#[derive(Clone, Debug, Default)]
pub struct ConstructOptions {
    pub step: StepOptions,
    /// Start the seed search no lower than this.
    pub min_n: Option<BigInt>,
}

/// Output of the constructive pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "crate::json::display")]
    pub n0: BigInt,
    pub certificate: WindowCertificate,
    pub seed: SeedResult,
    pub ladder: ConstantLadder,
    pub traces: Vec<LadderTrace>,
    /// `n_0 − n_{k−1}`.
    #[serde(serialize_with = "crate::json::display")]
    pub displacement: BigInt,
}

pub fn construct_witness(
    f: &PowerSumExpr,
    k: u32,
    h: u64,
    ladder: Option<&ConstantLadder>,
    prec: Precision,
) -> Result<Witness> {
    construct_witness_with(f, k, h, ladder, prec, &ConstructOptions::default())
}

/// Seeds order `k − 1`, descends to order 0 with `v_0 = 1` and `v_i = 0`,
/// and certifies the resulting point.
pub fn construct_witness_with(
    f: &PowerSumExpr,
    k: u32,
    h: u64,
    ladder: Option<&ConstantLadder>,
    prec: Precision,
    options: &ConstructOptions,
) -> Result<Witness> {
    crate::certificate::validate_window(k, h)?;
    let hyp = check_hypotheses(f, k);
    if !hyp.admissible() {
        return Err(Error::Hypothesis {
            k,
            vanishing: hyp.vanishing_kth,
            unbounded: hyp.unbounded_k_minus_1,
        });
    }
    let ladder = match ladder {
        Some(l) => {
            if l.k != k || l.h != h {
                return Err(Error::InvalidInput(format!(
                    "ladder built for k = {}, H = {} used with k = {k}, H = {h}",
                    l.k, l.h
                )));
            }
            let v = l.violations();
            if !v.is_empty() {
                return Err(Error::Inadmissible(v));
            }
            l.clone()
        }
        None => build_constants(k, h, None)?,
    };
    let seed = seed_top_level(f, &ladder, options.min_n.as_ref(), prec)?;
    let mut state = LadderState {
        m: k - 1,
        n0: seed.n.clone(),
        residues: vec![BigInt::zero()],
    };
    let mut traces = Vec::new();
    while state.m > 0 {
        let target = if state.m == 1 { BigInt::one() } else { BigInt::zero() };
        let (next, trace) = ladder_step(f, &state, &target, &ladder, prec, &options.step)?;
        traces.push(trace);
        state = next;
    }
    let n0 = state.n0;
    let ku = k as usize;

    let displacement = &n0 - &seed.n;
    if displacement.is_negative() || displacement > ladder.max_displacement() {
        return Err(contradiction(format!("displacement {displacement} exceeds the ladder bound")));
    }
    let g = f.differentiate(k - 1);
    let drift = RootSum::point(&g, &n0)?.minus(&RootSum::point(&g, &seed.n)?);
    let bound = q(&ladder.c[ku - 1]).recip();
    if !drift.strictly_within(&-bound.clone(), &bound, prec)? {
        return Err(contradiction(format!("f^({}) drifted by at least 1/C_{}", k - 1, k - 1)));
    }
    let (top_floor, _) = RootSum::point(&g, &n0)?.floor(prec)?;
    if top_floor != seed.floor {
        return Err(contradiction(format!(
            "floor of f^({})(n0) is {top_floor}, expected {}",
            k - 1,
            seed.floor
        )));
    }
    let certificate = check_conditions(f, &n0, k, h, prec)?;
    if !certificate.all_true() {
        return Err(contradiction(format!(
            "constructed n0 = {n0} fails {}",
            certificate.failed_conditions().join(", ")
        )));
    }
    Ok(Witness {
        n0,
        certificate,
        seed,
        ladder,
        traces,
        displacement,
    })
}

/// Bits of a positive integer, handy for reporting heights like `2^1043`.
pub fn log2_floor(n: &BigInt) -> u64 {
    n.bits().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_function;
    use crate::search::ladder::LadderOverrides;

    fn small_ladder() -> ConstantLadder {
        let ov: LadderOverrides = "C0=2^10,C1=2^13,D0=8,D1=2^11,D2=2^67".parse().unwrap();
        build_constants(2, 2, Some(&ov)).unwrap()
    }

    #[test]
    fn dominance_point_sqrt_power() {
        let f = parse_function("x^(3/2)").unwrap();
        let d = BigInt::one() << 522u32;
        let x0 = dominance_point(&f, 2, &d).unwrap();
        // (3/4)·x^{-1/2} < 2^{-522}  ⇔  x > (9/16)·2^{1044}
        let exact = (BigInt::from(9) << 1044u32) / 16;
        assert!(x0 > exact && x0 <= &exact + 2);
        assert_eq!(log2_floor(&x0), 1043);
    }

    #[test]
    fn seed_small_ladder() {
        let f = parse_function("x^(3/2)").unwrap();
        let ladder = small_ladder();
        let seed = seed_top_level(&f, &ladder, None, Precision::default()).unwrap();
        assert_eq!(seed.floor, BigInt::from(2).pow(seed.s_exponent) * 2);
        assert!(seed.n > seed.x0);
    }

    #[test]
    fn seed_rejects_remark_function() {
        let f = parse_function("x^2 + 1/x").unwrap();
        let ladder = build_constants(3, 3, None).unwrap();
        assert!(matches!(seed_top_level(&f, &ladder, None, Precision::default()), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn small_pipeline_certifies() {
        let f = parse_function("x^(3/2)").unwrap();
        let ladder = small_ladder();
        let w = construct_witness(&f, 2, 2, Some(&ladder), Precision::default()).unwrap();
        assert!(w.certificate.all_true());
        let tr = &w.traces[0];
        assert_eq!(&tr.r + &tr.t, tr.s);
        assert!(tr.s.is_multiple_of(&ladder.modulus()));
        assert!(tr.n1 <= &tr.n0 + BigInt::from(4) * ladder.modulus() * &ladder.c[1]);
    }

    #[test]
    fn binary_and_linear_agree() {
        let f = parse_function("x^(3/2)").unwrap();
        let ladder = small_ladder();
        let seed = seed_top_level(&f, &ladder, None, Precision::default()).unwrap();
        let state = LadderState {
            m: 1,
            n0: seed.n,
            residues: vec![BigInt::zero()],
        };
        let linear = StepOptions {
            search: StepSearch::Linear,
            trace: false,
        };
        for v in [1, 2, -7] {
            let (s1, t1) = ladder_step(&f, &state, &BigInt::from(v), &ladder, Precision::default(), &StepOptions::default()).unwrap();
            let (s2, t2) = ladder_step(&f, &state, &BigInt::from(v), &ladder, Precision::default(), &linear).unwrap();
            assert_eq!(s1, s2);
            assert_eq!((t1.r, t1.t, t1.s), (t2.r, t2.t, t2.s));
        }
    }

    #[test]
    fn construct_rejects_bad_hypotheses() {
        let f = parse_function("x^2 + 1/x").unwrap();
        assert!(matches!(
            construct_witness(&f, 3, 3, None, Precision::default()),
            Err(Error::Hypothesis { .. })
        ));
    }
}
