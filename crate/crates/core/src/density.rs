//! Coprimality frequencies measured by exhaustive counting and compared with
//! `1/ζ(s)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{mobius_sieve, zeta_inverse};
use crate::powersum::{Exponent, PowerSumExpr, Scalar};
use crate::rigor::{floor_frac, Enclosure, Precision};
use crate::{Error, Result};

/// Schema tag written into serialized density reports.
pub const DENSITY_SCHEMA: &str = "kwise.density/1";

/// Largest `N` for which the pair count is cross-checked by a double loop.
pub const DOUBLE_LOOP_LIMIT: u64 = 2000;

/// Width of the `1/ζ(s)` enclosure; far below any sampling deviation.
const ZETA_TOLERANCE: f64 = 1e-10;

/// Counts are sharded over this many consecutive values of `n`.
const SHARD: u64 = 512;

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub schema: &'static str,
    pub experiment: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub count: u64,
    /// Number of tuples counted.
    pub total: u64,
    #[serde(serialize_with = "crate::json::display")]
    pub frequency: BigRational,
    pub frequency_approx: f64,
    /// `1/ζ(s)`.
    pub target: Enclosure,
    pub zeta_s: u32,
    /// `|frequency − midpoint(target)|`.
    pub deviation: f64,
}

impl DensityReport {
    fn new(experiment: String, n: u64, count: u64, total: u64, zeta_s: u32) -> Result<Self> {
        let target = zeta_inverse(zeta_s, ZETA_TOLERANCE)?;
        let frequency = if total == 0 {
            BigRational::zero()
        } else {
            BigRational::new(count.into(), total.into())
        };
        let deviation = (&frequency - target.midpoint()).abs().to_f64().unwrap_or(f64::NAN);
        Ok(DensityReport {
            schema: DENSITY_SCHEMA,
            experiment,
            n,
            count,
            total,
            frequency_approx: frequency.to_f64().unwrap_or(f64::NAN),
            frequency,
            target,
            zeta_s,
            deviation,
        })
    }

    pub const CSV_HEADER: &'static str = "experiment,N,count,total,frequency,target,deviation";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.9},{:.9},{:.9}",
            self.experiment.replace(',', ";"),
            self.n,
            self.count,
            self.total,
            self.frequency_approx,
            self.target.approx(),
            self.deviation
        )
    }
}

/// `#{(a, b) ∈ [1,N]² : gcd(a, b) = 1}` as `Σ_{d≤N} μ(d)⌊N/d⌋²`.
pub fn coprime_pairs_mobius(n: u64) -> u64 {
    let mu = mobius_sieve(n as usize);
    (1..=n)
        .map(|d| {
            let q = (n / d) as i128;
            mu[d as usize] as i128 * q * q
        })
        .sum::<i128>() as u64
}

/// Same count by testing every pair.
pub fn coprime_pairs_double_loop(n: u64) -> u64 {
    (1..=n)
        .into_par_iter()
        .map(|a| (1..=n).filter(|b| a.gcd(b) == 1).count() as u64)
        .sum()
}

/// Frequency of coprime pairs in `[1,N]²`, against `1/ζ(2)`.
pub fn dirichlet_density(n: u64) -> Result<DensityReport> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let count = coprime_pairs_mobius(n);
    if n <= DOUBLE_LOOP_LIMIT {
        let direct = coprime_pairs_double_loop(n);
        if direct != count {
            return Err(Error::InternalContradiction(format!(
                "Möbius count {count} differs from direct count {direct} at N = {n}"
            )));
        }
    }
    DensityReport::new("dirichlet".into(), n, count, n * n, 2)
}

/// Counts `n ≤ N` with `gcd(n, ⌊f_1(n)⌋, …) = 1`, sharded over `n`.
fn count_gcd_one(functions: &[PowerSumExpr], n_max: u64, prec: Precision) -> Result<u64> {
    let shards: Vec<u64> = (1..=n_max).step_by(SHARD as usize).collect();
    let counts: Vec<u64> = shards
        .par_iter()
        .map(|&start| {
            let mut count = 0u64;
            for n in start..(start + SHARD).min(n_max + 1) {
                let x = BigInt::from(n);
                let mut g = x.clone();
                for f in functions {
                    g = g.gcd(&floor_frac(f, &x, 0, prec)?.floor_part);
                    if g == BigInt::from(1) {
                        break;
                    }
                }
                if g == BigInt::from(1) {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<_>>()?;
    Ok(counts.into_iter().sum())
}

/// Frequency of `gcd(n, ⌊αn⌋) = 1` for `n ≤ N`, against `1/ζ(2)`.
pub fn beatty_coprime_density(alpha: &Scalar, n: u64, prec: Precision) -> Result<DensityReport> {
    if alpha.is_rational() || !alpha.is_positive() {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be a positive irrational surd")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let f = PowerSumExpr::monomial(alpha.clone(), Exponent::from_integer(1));
    let count = count_gcd_one(std::slice::from_ref(&f), n, prec)?;
    DensityReport::new(format!("beatty:{alpha}"), n, count, n, 2)
}

/// Frequency of `gcd(n, ⌊n^c⌋) = 1` for `n ≤ N`, against `1/ζ(2)`.
pub fn floor_power_density(c: Exponent, n: u64, prec: Precision) -> Result<DensityReport> {
    if c.is_integer() || c <= Exponent::from_integer(1) {
        return Err(Error::InvalidInput(format!("exponent {c} must be a non-integer above 1")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let f = PowerSumExpr::monomial(Scalar::one(), c);
    let count = count_gcd_one(std::slice::from_ref(&f), n, prec)?;
    DensityReport::new(format!("floor_power:{c}"), n, count, n, 2)
}

/// Frequency of `gcd(n, ⌊f_1(n)⌋, …, ⌊f_j(n)⌋) = 1` for `n ≤ N`, against
/// `1/ζ(j+1)`.
pub fn multi_gcd_density(functions: &[PowerSumExpr], n: u64, prec: Precision) -> Result<DensityReport> {
    if functions.is_empty() {
        return Err(Error::InvalidInput("at least one function is required".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    for f in functions {
        let grows = f
            .leading()
            .is_some_and(|t| t.coefficient.is_positive() && t.exponent > Exponent::from_integer(0));
        if !grows {
            return Err(Error::InvalidInput(format!("{f} does not tend to +infinity")));
        }
    }
    let count = count_gcd_one(functions, n, prec)?;
    let names: Vec<String> = functions.iter().map(|f| f.to_string()).collect();
    DensityReport::new(format!("multi_gcd:[{}]", names.join("; ")), n, count, n, functions.len() as u32 + 1)
}

/// A density experiment, independent of `N`.
#[derive(Clone, Debug)]
pub enum Experiment {
    Dirichlet,
    Beatty(Scalar),
    FloorPower(Exponent),
    MultiGcd(Vec<PowerSumExpr>),
}

impl Experiment {
    pub fn run(&self, n: u64, prec: Precision) -> Result<DensityReport> {
        match self {
            Experiment::Dirichlet => dirichlet_density(n),
            Experiment::Beatty(alpha) => beatty_coprime_density(alpha, n, prec),
            Experiment::FloorPower(c) => floor_power_density(*c, n, prec),
            Experiment::MultiGcd(fs) => multi_gcd_density(fs, n, prec),
        }
    }

    /// One report per `N`, e.g. for frequency-versus-`N` plots.
    pub fn table(&self, ns: &[u64], prec: Precision) -> Result<Vec<DensityReport>> {
        ns.iter().map(|&n| self.run(n, prec)).collect()
    }
}
