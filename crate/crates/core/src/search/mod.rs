//! Witness search: exhaustive scans over a range and the constructive descent.

mod construct;
mod ladder;

pub use construct::{
    construct_witness, construct_witness_with, dominance_point, ladder_step, log2_floor, seed_top_level,
    ConstructOptions, IncrementSample, LadderState, LadderTrace, Probe, SeedResult, StepOptions, StepSearch, Witness,
};
pub use ladder::{build_constants, ConstantLadder, LadderOverrides, LadderSource, StageConstants};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::kwise_coprime;
use crate::certificate::{validate_window, verify_window};
use crate::powersum::PowerSumExpr;
use crate::rigor::{floor_frac, Precision};
use crate::{Error, Result};

/// Schema tag written into serialized scan reports.
pub const SCAN_SCHEMA: &str = "kwise.scan/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Every k-subset of the window has gcd 1.
    #[default]
    Kwise,
    /// Every pair in the window has gcd 1.
    Pairwise,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kwise" => Ok(ScanMode::Kwise),
            "pairwise" => Ok(ScanMode::Pairwise),
            _ => Err(Error::InvalidInput(format!("unknown scan mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanWitness {
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    /// `⌊f(n+h)⌋` for `h = 1..=H`.
    #[serde(serialize_with = "crate::json::vec_display")]
    pub floors: Vec<BigInt>,
}

/// A window rejected by the scan, with the offsets of a common-factor subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRejection {
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    pub failing_subset: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Undecided {
    #[serde(serialize_with = "crate::json::display")]
    pub n: BigInt,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub schema: &'static str,
    #[serde(serialize_with = "crate::json::display")]
    pub f: PowerSumExpr,
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u64,
    pub mode: ScanMode,
    #[serde(serialize_with = "crate::json::display")]
    pub n_lo: BigInt,
    #[serde(serialize_with = "crate::json::display")]
    pub n_hi: BigInt,
    pub scanned: u64,
    pub witnesses: Vec<ScanWitness>,
    /// Only filled when requested; one entry per failing window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejections: Option<Vec<ScanRejection>>,
    pub undecided: Vec<Undecided>,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub mode: ScanMode,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    pub keep_rejections: bool,
    pub prec: Precision,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            mode: ScanMode::Kwise,
            jobs: 1,
            keep_rejections: false,
            prec: Precision::default(),
        }
    }
}

enum Outcome {
    Witness(ScanWitness),
    Rejected(ScanRejection),
    Undecided(Undecided),
}

/// Scans `n ∈ [n_lo, n_hi]`, keeping every `n` whose window
/// `⌊f(n+1)⌋, …, ⌊f(n+H)⌋` is coprime in the chosen mode. Each witness is
/// re-checked by [`verify_window`]; undecidable floors are reported per `n`.
pub fn brute_scan(
    f: &PowerSumExpr,
    k: u32,
    h: u64,
    n_lo: &BigInt,
    n_hi: &BigInt,
    options: &ScanOptions,
) -> Result<ScanReport> {
    validate_window(k, h)?;
    if n_lo > n_hi {
        return Err(Error::InvalidInput(format!("empty range [{n_lo}, {n_hi}]")));
    }
    if n_lo < &BigInt::from(0) {
        return Err(Error::InvalidInput(format!("range start {n_lo} is negative")));
    }
    let span: u64 = (n_hi - n_lo + 1u32)
        .try_into()
        .map_err(|_| Error::InvalidInput("scan range too long".into()))?;
    let jobs = if options.jobs == 0 {
        rayon::current_num_threads()
    } else {
        options.jobs
    };
    let chunk = span.div_ceil(jobs as u64).max(1);
    let shards: Vec<(u64, u64)> = (0..span)
        .step_by(chunk as usize)
        .map(|start| (start, (start + chunk).min(span)))
        .collect();
    let run = || -> Result<Vec<Vec<Outcome>>> {
        shards
            .par_iter()
            .map(|&(a, b)| scan_shard(f, k, h, &(n_lo + a), b - a, options))
            .collect()
    };
    let results = if jobs == rayon::current_num_threads() {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start {jobs} workers: {e}")))?
            .install(run)?
    };
    let mut witnesses = Vec::new();
    let mut rejections = options.keep_rejections.then(Vec::new);
    let mut undecided = Vec::new();
    for outcome in results.into_iter().flatten() {
        match outcome {
            Outcome::Witness(w) => witnesses.push(w),
            Outcome::Rejected(r) => {
                if let Some(list) = rejections.as_mut() {
                    list.push(r);
                }
            }
            Outcome::Undecided(u) => undecided.push(u),
        }
    }
    Ok(ScanReport {
        schema: SCAN_SCHEMA,
        f: f.clone(),
        k,
        h,
        mode: options.mode,
        n_lo: n_lo.clone(),
        n_hi: n_hi.clone(),
        scanned: span,
        witnesses,
        rejections,
        undecided,
    })
}

fn scan_shard(
    f: &PowerSumExpr,
    k: u32,
    h: u64,
    start: &BigInt,
    len: u64,
    options: &ScanOptions,
) -> Result<Vec<Outcome>> {
    let prec = options.prec;
    // Floors of f at start+1 ..= start+len+H−1, computed once and shared by
    // the overlapping windows.
    let floors: Vec<std::result::Result<BigInt, String>> = (1..len + h)
        .map(|j| match floor_frac(f, &(start + j), 0, prec) {
            Ok(ff) => Ok(ff.floor_part),
            Err(e) => Err(e.to_string()),
        })
        .collect();
    let subset_size = match options.mode {
        ScanMode::Kwise => k,
        ScanMode::Pairwise => 2,
    };
    let mut out = Vec::with_capacity(len as usize);
    for offset in 0..len {
        let n = start + offset;
        let window = &floors[offset as usize..(offset + h) as usize];
        if let Some(Err(reason)) = window.iter().find(|v| v.is_err()) {
            out.push(Outcome::Undecided(Undecided { n, reason: reason.clone() }));
            continue;
        }
        let window: Vec<BigInt> = window.iter().map(|v| v.clone().expect("checked")).collect();
        let outcome = kwise_coprime(&window, subset_size as usize);
        if let Some(subset) = outcome.failing_subset {
            out.push(Outcome::Rejected(ScanRejection {
                n,
                failing_subset: subset.iter().map(|&i| i as u64 + 1).collect(),
            }));
            continue;
        }
        let report = verify_window(f, &n, subset_size, h, prec)?;
        if report.floors != window || !report.kwise_coprime {
            return Err(Error::InternalContradiction(format!(
                "scan witness n = {n} disagrees with independent verification"
            )));
        }
        out.push(Outcome::Witness(ScanWitness { n, floors: window }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_function;

    fn scan(text: &str, k: u32, h: u64, lo: i64, hi: i64, mode: ScanMode, jobs: usize) -> ScanReport {
        let f = parse_function(text).unwrap();
        let options = ScanOptions {
            mode,
            jobs,
            ..ScanOptions::default()
        };
        brute_scan(&f, k, h, &lo.into(), &hi.into(), &options).unwrap()
    }

    #[test]
    fn first_witness_sqrt_power() {
        let report = scan("x^(3/2)", 2, 3, 1, 100, ScanMode::Kwise, 1);
        let first = &report.witnesses[0];
        assert_eq!(first.n, BigInt::from(2));
        assert_eq!(first.floors, vec![BigInt::from(5), BigInt::from(8), BigInt::from(11)]);
    }

    #[test]
    fn remark_function_has_no_witness() {
        let report = scan("x^2 + 1/x", 2, 4, 2, 1000, ScanMode::Kwise, 4);
        assert!(report.witnesses.is_empty());
        assert!(report.undecided.is_empty());
        assert_eq!(report.scanned, 999);
    }

    #[test]
    fn consecutive_squares() {
        let report = scan("x^2", 2, 2, 1, 10, ScanMode::Kwise, 1);
        assert_eq!(report.witnesses.len(), 10);
    }

    #[test]
    fn sharding_is_deterministic() {
        let a = scan("x^(3/2)", 2, 3, 1, 300, ScanMode::Pairwise, 1);
        let b = scan("x^(3/2)", 2, 3, 1, 300, ScanMode::Pairwise, 7);
        assert_eq!(a.witnesses, b.witnesses);
    }

    #[test]
    fn rejects_empty_range() {
        let f = parse_function("x^2").unwrap();
        assert!(brute_scan(&f, 2, 2, &5.into(), &4.into(), &ScanOptions::default()).is_err());
    }
}
