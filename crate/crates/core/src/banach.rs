//! Sets made of certified blocks `{n_r+1, …, n_r+H_r}` whose floors are
//! k-wise coprime across the whole set.
//!
//! Each block length exceeds the previous length plus the sum of `|f|` over
//! the previous block, which keeps every small prime of a later block away
//! from the floors of earlier ones.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::kwise_coprime;
use crate::certificate::{verify_window, WindowCertificate};
use crate::powersum::PowerSumExpr;
use crate::rigor::{floor_frac, Precision, RootSum};
use crate::search::{build_constants, construct_witness_with, ConstructOptions, LadderOverrides};
use crate::{Error, Result};

/// Schema tag written into serialized block sets.
pub const BANACH_SCHEMA: &str = "kwise.banach/1";

/// Enumerate every k-subset when there are at most this many.
pub const EXHAUSTIVE_LIMIT: u64 = 100_000;

/// Refuse to compute floors for more elements than this.
pub const MATERIALIZE_LIMIT: u64 = 10_000_000;

/// Longest block whose sum `Σ |f(n+j)|` is evaluated term by term.
const SCHEDULE_SUM_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BanachBlock {
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    #[serde(rename = "H", serialize_with = "crate::json::display")]
    pub h: BigInt,
    pub certified: bool,
    #[serde(skip)]
    pub certificate: Option<WindowCertificate>,
}

impl BanachBlock {
    /// A block taken on trust, e.g. for negative controls.
    pub fn uncertified(n: impl Into<BigInt>, h: impl Into<BigInt>) -> Self {
        BanachBlock {
            n: n.into(),
            h: h.into(),
            certified: false,
            certificate: None,
        }
    }

    /// One past the last element.
    pub fn end(&self) -> BigInt {
        &self.n + &self.h
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BanachSet {
    pub schema: &'static str,
    #[serde(serialize_with = "crate::json::display")]
    pub f: PowerSumExpr,
    pub k: u32,
    pub blocks: Vec<BanachBlock>,
}

impl BanachSet {
    pub fn from_blocks(f: PowerSumExpr, k: u32, blocks: Vec<BanachBlock>) -> Self {
        BanachSet {
            schema: BANACH_SCHEMA,
            f,
            k,
            blocks,
        }
    }

    pub fn element_count(&self) -> BigInt {
        self.blocks.iter().map(|b| &b.h).sum()
    }

    /// Elements in increasing order; fails beyond [`MATERIALIZE_LIMIT`].
    pub fn elements(&self) -> Result<Vec<BigInt>> {
        let total = self.element_count();
        if total > BigInt::from(MATERIALIZE_LIMIT) {
            return Err(Error::InvalidInput(format!("{total} elements are too many to enumerate")));
        }
        let mut out = Vec::with_capacity(total.to_usize().unwrap_or(0));
        for b in &self.blocks {
            let mut x = &b.n + 1u32;
            let end = b.end();
            while x <= end {
                out.push(x.clone());
                x += 1u32;
            }
        }
        Ok(out)
    }

    /// Structural violations: disjoint increasing blocks with strictly
    /// increasing lengths.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (r, b) in self.blocks.iter().enumerate() {
            if b.h < BigInt::one() || b.n < BigInt::zero() {
                out.push(format!("block {}: empty or negative", r + 1));
            }
        }
        for (r, pair) in self.blocks.windows(2).enumerate() {
            if pair[1].n <= pair[0].end() {
                out.push(format!("blocks {} and {} overlap", r + 1, r + 2));
            }
            if pair[1].h <= pair[0].h {
                out.push(format!("block {} is not longer than block {}", r + 2, r + 1));
            }
        }
        out
    }

    /// Every consecutive pair satisfies `H_r ≥ schedule_H(block_{r−1})`.
    pub fn schedule_violations(&self, prec: Precision) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (r, pair) in self.blocks.windows(2).enumerate() {
            let need = schedule_h(&pair[0], &self.f, prec)?;
            if pair[1].h < need {
                out.push(format!("block {} has H = {} < {need}", r + 2, pair[1].h));
            }
        }
        Ok(out)
    }
}

/// Least integer strictly above `H + Σ_{j=1}^{H} |f(n+j)|` for the block `(n, H)`.
pub fn schedule_h(prev: &BanachBlock, f: &PowerSumExpr, prec: Precision) -> Result<BigInt> {
    let len = prev
        .h
        .to_u64()
        .filter(|&h| h <= SCHEDULE_SUM_LIMIT)
        .ok_or_else(|| Error::InvalidInput(format!("block length {} too large to sum over", prev.h)))?;
    let mut total = RootSum::from_rational(BigRational::from_integer(prev.h.clone()));
    for j in 1..=len {
        let value = RootSum::point(f, &(&prev.n + j))?;
        total = match value.cmp_rational(&BigRational::zero(), prec)? {
            Ordering::Less => total.minus(&value),
            _ => total.plus(&value),
        };
    }
    let (floor, _) = total.floor(prec)?;
    Ok(floor + 1)
}

/// Source of witnesses `n ≥ min_n` whose certificate with window `H` holds.
pub trait WitnessProvider {
    fn name(&self) -> &str;
    fn provide(&mut self, f: &PowerSumExpr, k: u32, h: u64, min_n: &BigInt) -> Result<BigInt>;
}

/// The constructive descent, started no lower than `min_n`.
#[derive(Clone, Debug, Default)]
pub struct PipelineProvider {
    pub overrides: Option<LadderOverrides>,
    pub prec: Precision,
}

impl WitnessProvider for PipelineProvider {
    fn name(&self) -> &str {
        "pipeline"
    }

    fn provide(&mut self, f: &PowerSumExpr, k: u32, h: u64, min_n: &BigInt) -> Result<BigInt> {
        let ladder = build_constants(k, h, self.overrides.as_ref())?;
        let options = ConstructOptions {
            min_n: Some(min_n.clone()),
            ..ConstructOptions::default()
        };
        Ok(construct_witness_with(f, k, h, Some(&ladder), self.prec, &options)?.n0)
    }
}

/// Walks `n = min_n, min_n + 1, …` until the certificate holds.
#[derive(Clone, Debug)]
pub struct ScanProvider {
    pub limit: u64,
    pub prec: Precision,
}

impl WitnessProvider for ScanProvider {
    fn name(&self) -> &str {
        "scan"
    }

    fn provide(&mut self, f: &PowerSumExpr, k: u32, h: u64, min_n: &BigInt) -> Result<BigInt> {
        let start = min_n.max(&BigInt::one()).clone();
        for offset in 0..self.limit {
            let n = &start + offset;
            if crate::certificate::check_conditions(f, &n, k, h, self.prec)?.all_true() {
                return Ok(n);
            }
        }
        Err(Error::Provider(format!(
            "no certified point in [{start}, {start} + {})",
            self.limit
        )))
    }
}

/// Builds `r_max` blocks: the first of length `h1`, each later one as short
/// as the schedule allows and placed after its predecessor. Every block is
/// re-verified independently of the provider.
pub fn build_banach_set(
    f: &PowerSumExpr,
    k: u32,
    h1: u64,
    r_max: usize,
    provider: &mut dyn WitnessProvider,
    prec: Precision,
) -> Result<BanachSet> {
    crate::certificate::validate_window(k, h1)?;
    let mut blocks: Vec<BanachBlock> = Vec::with_capacity(r_max);
    for r in 0..r_max {
        let (h, min_n) = match blocks.last() {
            None => (BigInt::from(h1), BigInt::one()),
            Some(prev) => (schedule_h(prev, f, prec)?, prev.end() + 1u32),
        };
        let h_small = h
            .to_u64()
            .ok_or_else(|| Error::Provider(format!("block {} needs H = {h}, beyond reach", r + 1)))?;
        let n = provider.provide(f, k, h_small, &min_n)?;
        if n < min_n {
            return Err(Error::Provider(format!(
                "{} returned n = {n} below the required {min_n}",
                provider.name()
            )));
        }
        let report = verify_window(f, &n, k, h_small, prec)?;
        if !report.certificate.all_true() {
            return Err(Error::CertificateInvalid(format!(
                "block {} at n = {n}: {}",
                r + 1,
                report.certificate.failed_conditions().join(", ")
            )));
        }
        if !report.consistent() {
            return Err(Error::InternalContradiction(format!(
                "block {} at n = {n} is certified but its window is not coprime",
                r + 1
            )));
        }
        blocks.push(BanachBlock {
            n,
            h,
            certified: true,
            certificate: Some(report.certificate),
        });
    }
    Ok(BanachSet::from_blocks(f.clone(), k, blocks))
}

/// `max_r |𝒜 ∩ (n_r, n_r + H]| / H`, the largest share of a window of length
/// `H` that starts at a block.
pub fn banach_density_estimate(set: &BanachSet, window: &BigInt) -> Result<BigRational> {
    if window < &BigInt::one() {
        return Err(Error::InvalidInput("window length must be positive".into()));
    }
    let mut best = BigInt::zero();
    for start in &set.blocks {
        let lo = &start.n;
        let hi = lo + window;
        let covered: BigInt = set
            .blocks
            .iter()
            .map(|b| {
                let a = lo.max(&b.n);
                let z = hi.clone().min(b.end());
                if &z > a {
                    z - a
                } else {
                    BigInt::zero()
                }
            })
            .sum();
        best = best.max(covered);
    }
    Ok(BigRational::new(best, window.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossBlockOutcome {
    pub coprime: bool,
    pub exhaustive: bool,
    /// Number of k-subsets examined (exhaustive checks prune, so this is the
    /// number of subsets covered).
    #[serde(serialize_with = "crate::json::display")]
    pub subsets: BigInt,
    /// Elements of a subset whose floors share a factor.
    #[serde(serialize_with = "crate::json::opt_vec_display")]
    pub failing_elements: Option<Vec<BigInt>>,
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Checks that the floors of any `k` distinct elements of the set have
/// gcd 1: every subset when there are few, otherwise `samples` subsets drawn
/// from a generator seeded with `seed`.
pub fn cross_block_check(
    set: &BanachSet,
    k: u32,
    samples: u64,
    seed: u64,
    prec: Precision,
) -> Result<CrossBlockOutcome> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let elements = set.elements()?;
    if elements.is_empty() {
        return Err(Error::InvalidInput("the set has no elements".into()));
    }
    let floors: Vec<BigInt> = elements
        .par_iter()
        .map(|x| Ok(floor_frac(&set.f, x, 0, prec)?.floor_part))
        .collect::<Result<_>>()?;
    let size = floors.len() as u64;
    let total = binomial(size, k as u64);
    if total <= BigInt::from(EXHAUSTIVE_LIMIT) {
        let outcome = kwise_coprime(&floors, k as usize);
        return Ok(CrossBlockOutcome {
            coprime: outcome.coprime,
            exhaustive: true,
            subsets: total,
            failing_elements: outcome
                .failing_subset
                .map(|s| s.into_iter().map(|i| elements[i].clone()).collect()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut picked = rand::seq::index::sample(&mut rng, floors.len(), k as usize).into_vec();
        picked.sort_unstable();
        let g = picked.iter().fold(BigInt::zero(), |acc, &i| acc.gcd(&floors[i]));
        if !g.is_one() {
            return Ok(CrossBlockOutcome {
                coprime: false,
                exhaustive: false,
                subsets: BigInt::from(samples),
                failing_elements: Some(picked.into_iter().map(|i| elements[i].clone()).collect()),
            });
        }
    }
    Ok(CrossBlockOutcome {
        coprime: true,
        exhaustive: false,
        subsets: BigInt::from(samples),
        failing_elements: None,
    })
}
