//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use kwise_core::arith::ladder_modulus;
use kwise_core::banach::WitnessProvider;
use kwise_core::rigor::{compare_value, floor_frac, Precision};
use kwise_core::search::{build_constants, ConstantLadder, LadderOverrides};
use kwise_core::{parse_function, BigInt, BigRational, PowerSumExpr};
use num_integer::Integer;
use rand::Rng;
use std::cmp::Ordering;

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn pow2(e: u32) -> BigInt {
    BigInt::from(1) << e
}

/// `(k!Π_H)·x + 1 + x/2^m`: exact rational, so every condition can be
/// decided by hand.
pub fn synthetic_family(k: u32, h: u64, m: u32) -> PowerSumExpr {
    let modulus = ladder_modulus(k, h);
    parse_function(&format!("{modulus}*x + 1 + x/2^{m}")).unwrap()
}

/// Open interval of `n` where the synthetic family satisfies every condition:
/// `{f(n)} = n/2^m ∈ (4^{-4k}, 1/4)`.
pub fn synthetic_range(k: u32, m: u32) -> (BigInt, BigInt) {
    (pow2(m - 8 * k), pow2(m - 2))
}

/// Independent re-implementation of one descent step by walking
/// `h = 1, 2, …` and comparing `f^{(m−1)}(n_0+h)` with `b + Σ h^i/i!·F_i`.
/// Returns `(r, t, s, n_1)`.
pub fn linear_step_oracle(
    f: &PowerSumExpr,
    n0: &BigInt,
    m: u32,
    target: &BigInt,
    ladder: &ConstantLadder,
    prec: Precision,
) -> (BigInt, BigInt, BigInt, BigInt) {
    let k = ladder.k;
    let t_stage = k - m;
    let scale = pow2(t_stage - 1);
    let a_m = &ladder.c[m as usize] * &scale;
    let a_prev = &ladder.c[m as usize - 1] * &scale;
    let modulus = ladder_modulus(k, ladder.h);
    let floors: Vec<BigInt> = (m..k)
        .map(|i| floor_frac(f, n0, i, prec).unwrap().floor_part)
        .collect();
    let a0_floor = floor_frac(f, n0, m - 1, prec).unwrap().floor_part;
    let first = a0_floor + 1;
    let gap: BigInt = target - &first;
    let b: BigInt = &first + gap.mod_floor(&modulus);
    let mut h = BigInt::from(1);
    let r = loop {
        let hq = BigRational::from_integer(h.clone());
        let mut weight = BigRational::from_integer(1.into());
        let mut rhs = BigRational::from_integer(b.clone());
        for (i, floor) in floors.iter().enumerate() {
            weight = weight * &hq / BigRational::from_integer(BigInt::from(i + 1));
            rhs += &weight * BigRational::from_integer(floor.clone());
        }
        if compare_value(f, &(n0 + &h), m - 1, &rhs, prec).unwrap() != Ordering::Less {
            break h;
        }
        h += 1;
    };
    let r0 = r.mod_floor(&modulus);
    let t = ((BigInt::from(4) * &a_m) / (&modulus * &a_prev) + 1) * &modulus - r0;
    let s = &r + &t;
    let n1 = n0 + &s;
    (r, t, s, n1)
}

/// A random admissible ladder for `k = 2`. Admissibility forces
/// `D_1 > 20 k!Π_H D_0` and `C_1 > 2 D_1`; capping `C_1` at `2^{14}` keeps
/// the linear oracle affordable.
pub fn random_small_ladder<R: Rng>(rng: &mut R, h: u64) -> ConstantLadder {
    loop {
        let d0 = rng.gen_range(3..=4u32);
        let c1 = rng.gen_range(11..=14u32);
        let d1 = rng.gen_range(c1 - 4..c1);
        let c0 = rng.gen_range(d0 + 3..=c1 - 3);
        let d2 = rng.gen_range(6 * d1 + 1..=6 * d1 + 12);
        let odd = if rng.gen_bool(0.3) { "*3" } else { "" };
        let text = format!("D0=2^{d0},C0=2^{c0},D1=2^{d1}{odd},C1=2^{c1},D2=2^{d2}");
        let ov: LadderOverrides = text.parse().unwrap();
        if let Ok(l) = build_constants(2, h, Some(&ov)) {
            return l;
        }
    }
}

/// A fixed small admissible ladder for `k = 2`, `H = 2`.
pub fn small_ladder() -> ConstantLadder {
    let ov: LadderOverrides = "C0=2^10,C1=2^13,D0=8,D1=2^11,D2=2^67".parse().unwrap();
    build_constants(2, 2, Some(&ov)).unwrap()
}

/// Witnesses for `f = 1 + x/2^m`: every `n ∈ (2^{m−8k}, 2^{m−2} − H)` has
/// `{f(n)} = n/2^m`, `⌊f'⌋ = 0` and window floors all equal to 1.
pub struct SyntheticProvider {
    pub m: u32,
}

impl SyntheticProvider {
    pub fn function(&self) -> PowerSumExpr {
        parse_function(&format!("1 + x/2^{}", self.m)).unwrap()
    }
}

impl WitnessProvider for SyntheticProvider {
    fn name(&self) -> &str {
        "synthetic"
    }

    fn provide(&mut self, _f: &PowerSumExpr, k: u32, h: u64, min_n: &BigInt) -> kwise_core::Result<BigInt> {
        let floor = pow2(self.m - 8 * k) + 1;
        let n = if min_n > &floor { min_n.clone() } else { floor };
        if &n + h >= pow2(self.m - 2) {
            return Err(kwise_core::Error::Provider("synthetic range exhausted".into()));
        }
        Ok(n)
    }
}

/// Number of even entries.
pub fn even_count(values: &[BigInt]) -> usize {
    values.iter().filter(|v| v.is_even()).count()
}
