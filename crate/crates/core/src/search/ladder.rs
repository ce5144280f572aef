//! The constant ladder `C_i, D_i` and its per-stage form `A_i, B_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::arith::ladder_modulus;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderSource {
    #[serde(rename = "paper_default")]
    Builtin,
    UserOverride,
}

/// Partial assignment of ladder constants. Unset entries fall back to the
/// default recursion, evaluated on top of whatever was overridden.
///
/// Textual form: comma-separated `NAME=VALUE` pairs where `NAME` is `C<i>`,
/// `D<i>`, or the stage-one aliases `A<i>` (for `C<i>`) and `B<i>` (for
/// `D<i>`), and `VALUE` is a product of factors `a` or `a^b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LadderOverrides {
    pub c: BTreeMap<u32, BigInt>,
    pub d: BTreeMap<u32, BigInt>,
}

impl LadderOverrides {
    pub fn is_empty(&self) -> bool {
        self.c.is_empty() && self.d.is_empty()
    }
}

fn parse_value(text: &str) -> Option<BigInt> {
    let mut product = BigInt::one();
    for factor in text.split('*') {
        let factor = factor.trim();
        let value = match factor.split_once('^') {
            Some((base, exp)) => {
                let base: BigInt = base.trim().parse().ok()?;
                let exp: u32 = exp.trim().parse().ok()?;
                Pow::pow(base, exp)
            }
            None => factor.parse().ok()?,
        };
        product *= value;
    }
    Some(product)
}

impl FromStr for LadderOverrides {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = LadderOverrides::default();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let bad = || Error::InvalidInput(format!("bad ladder override `{item}`"));
            let (name, value) = item.split_once('=').ok_or_else(bad)?;
            let name = name.trim();
            let mut chars = name.chars();
            let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
            let index: u32 = chars.as_str().parse().map_err(|_| bad())?;
            let value = parse_value(value).ok_or_else(bad)?;
            let target = match letter {
                'C' | 'A' => &mut out.c,
                'D' | 'B' => &mut out.d,
                _ => return Err(bad()),
            };
            target.insert(index, value);
        }
        Ok(out)
    }
}

/// Constants driving the constructive descent for fixed `k` and `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantLadder {
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u64,
    /// `C_0, …, C_{k−1}`.
    #[serde(serialize_with = "crate::json::vec_display")]
    pub c: Vec<BigInt>,
    /// `D_0, …, D_k`.
    #[serde(serialize_with = "crate::json::vec_display")]
    pub d: Vec<BigInt>,
    pub source: LadderSource,
}

/// Lemma-form constants at stage `t`, where `m = k − t` is the lowest order
/// already localized: `A_i = 2^{t−1} C_i`, `B_i = D_i / 2^{t−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageConstants {
    pub t: u32,
    pub m: u32,
    /// `A_i` for `0 ≤ i < k`.
    pub a: Vec<BigInt>,
    /// `B_i` for `0 ≤ i ≤ k`; kept rational since `D_i` need not be divisible
    /// by `2^{t−1}`.
    pub b: Vec<BigRational>,
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn q(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Builds the ladder, applying `overrides` on top of the default recursion
///
/// `D_0 = 4·2^k`, `D_1 = 2^{8k} k! Π_H`, `D_{i+1} = 2 D_i^6`,
/// `C_i = 2^{5(k−i)} D_i`, `D_k = (4 k! Π_H 2^k C_{k−1})^{6(k+1)}`,
///
/// and rejecting any result that fails an admissibility inequality.
pub fn build_constants(k: u32, h: u64, overrides: Option<&LadderOverrides>) -> Result<ConstantLadder> {
    crate::certificate::validate_window(k, h)?;
    let empty = LadderOverrides::default();
    let ov = overrides.unwrap_or(&empty);
    if let Some(&i) = ov.c.keys().find(|&&i| i >= k) {
        return Err(Error::InvalidInput(format!("C_{i} is not a ladder constant for k = {k}")));
    }
    if let Some(&i) = ov.d.keys().find(|&&i| i > k) {
        return Err(Error::InvalidInput(format!("D_{i} is not a ladder constant for k = {k}")));
    }
    let modulus = ladder_modulus(k, h);
    let ku = k as usize;
    let mut d: Vec<BigInt> = Vec::with_capacity(ku + 1);
    for i in 0..k {
        let default = match i {
            0 => pow2(k as u64 + 2),
            1 => pow2(8 * k as u64) * &modulus,
            _ => Pow::pow(&d[i as usize - 1], 6u32) * 2,
        };
        d.push(ov.d.get(&i).cloned().unwrap_or(default));
    }
    let c: Vec<BigInt> = (0..k)
        .map(|i| {
            ov.c.get(&i)
                .cloned()
                .unwrap_or_else(|| pow2(5 * (k - i) as u64) * &d[i as usize])
        })
        .collect();
    let top = ov.d.get(&k).cloned().unwrap_or_else(|| {
        let base = BigInt::from(4) * &modulus * pow2(k as u64) * &c[ku - 1];
        Pow::pow(base, 6 * (k + 1))
    });
    d.push(top);
    let ladder = ConstantLadder {
        k,
        h,
        c,
        d,
        source: if ov.is_empty() {
            LadderSource::Builtin
        } else {
            LadderSource::UserOverride
        },
    };
    let violations = ladder.violations();
    if violations.is_empty() {
        Ok(ladder)
    } else {
        Err(Error::Inadmissible(violations))
    }
}

impl ConstantLadder {
    /// `k!·Π_H`.
    pub fn modulus(&self) -> BigInt {
        ladder_modulus(self.k, self.h)
    }

    pub fn stage(&self, t: u32) -> StageConstants {
        assert!(t >= 1 && t < self.k, "stage {t} outside [1, k−1]");
        let scale = pow2(t as u64 - 1);
        StageConstants {
            t,
            m: self.k - t,
            a: self.c.iter().map(|c| c * &scale).collect(),
            b: self
                .d
                .iter()
                .map(|d| BigRational::new(d.clone(), scale.clone()))
                .collect(),
        }
    }

    /// `R = 2 k! Π_H A_m` at stage `t`.
    pub fn search_length(&self, t: u32) -> BigInt {
        let stage = self.stage(t);
        BigInt::from(2) * self.modulus() * &stage.a[stage.m as usize]
    }

    /// Inequalities the descent step from order `m = k − t` to `m − 1` relies on.
    pub fn stage_violations(&self, t: u32) -> Vec<String> {
        let s = self.stage(t);
        let (k, m) = (self.k as usize, s.m as usize);
        let md = q(&self.modulus());
        let a = |i: usize| q(&s.a[i]);
        let b = |i: usize| &s.b[i];
        let mut out = Vec::new();
        let mut fail = |ok: bool, what: String| {
            if !ok {
                out.push(format!("t={t}: {what}"));
            }
        };
        for i in m - 1..k {
            fail(s.a[i].is_positive_int() && b(i) > &BigRational::zero(), format!("A_{i}, B_{i} > 0"));
            fail(b(i) < &a(i), format!("B_{i} < A_{i}"));
        }
        for i in m + 1..=k {
            fail(b(i) > &Pow::pow(b(i - 1), 6u32), format!("B_{i} > B_{}^6", i - 1));
        }
        for i in m + 1..k {
            fail(s.a[i] > s.a[i - 1], format!("A_{i} > A_{}", i - 1));
        }
        fail(
            a(m) < Pow::pow(b(m), 2u32) / (q(&BigInt::from(16)) * &md),
            format!("A_{m} < B_{m}^2/(16 k! Pi_H)"),
        );
        fail(
            b(k) > &Pow::pow(q(&BigInt::from(4)) * &md * a(k - 1), k as u32 + 1),
            format!("B_{k} > (4 k! Pi_H A_{})^{}", k - 1, k + 1),
        );
        fail(
            q(&BigInt::from(20)) * b(m - 1) / a(m - 1) < b(m) / a(m),
            format!("20 B_{}/A_{} < B_{m}/A_{m}", m - 1, m - 1),
        );
        fail(md * a(m - 1) < a(m), format!("k! Pi_H A_{} < A_{m}", m - 1));
        out
    }

    /// Inequalities needed to seed the top order.
    pub fn seed_violations(&self) -> Vec<String> {
        let k = self.k as usize;
        let mut out = Vec::new();
        let (c, d, dk) = (q(&self.c[k - 1]), q(&self.d[k - 1]), q(&self.d[k]));
        let two = q(&BigInt::from(2));
        if c.recip() > (&two * &d).recip() - dk.recip() {
            out.push(format!("seed: 1/C_{} <= 1/(2 D_{}) - 1/D_{k}", k - 1, k - 1));
        }
        if dk < two * d {
            out.push(format!("seed: D_{k} >= 2 D_{}", k - 1));
        }
        out
    }

    /// Inequalities turning the final localization into the window conditions.
    pub fn final_violations(&self) -> Vec<String> {
        let k = self.k as usize;
        let mut out = Vec::new();
        let spread = pow2(k as u64 - 1);
        let spread_q = q(&spread);
        let hq = q(&BigInt::from(self.h));
        let four = q(&BigInt::from(4));
        let low_cap = Pow::pow(&four, 4 * k as u32);
        if q(&(&spread * &self.c[0])) > low_cap {
            out.push(format!("final: 2^{} C_0 <= 4^{}", k - 1, 4 * k));
        }
        if &spread_q / q(&self.d[0]) > four.recip() {
            out.push(format!("final: 2^{}/D_0 <= 1/4", k - 1));
        }
        for i in 1..k {
            if &spread_q / q(&self.d[i]) > (&four * Pow::pow(&hq, i as u32)).recip() {
                out.push(format!("final: 2^{}/D_{i} <= 1/(4 H^{i})", k - 1));
            }
        }
        if q(&self.d[k]) < low_cap * Pow::pow(&hq, k as u32) {
            out.push(format!("final: D_{k} >= 4^{} H^{k}", 4 * k));
        }
        let displacement = self.max_displacement();
        if &displacement * &self.c[k - 1] >= self.d[k] {
            out.push(format!("final: (4 k! Pi_H 2^k C_{}) C_{} < D_{k}", k - 1, k - 1));
        }
        out
    }

    /// `4 k! Π_H 2^k C_{k−1}`, the bound on `n_0 − n_{k−1}`.
    pub fn max_displacement(&self) -> BigInt {
        BigInt::from(4) * self.modulus() * pow2(self.k as u64) * &self.c[self.k as usize - 1]
    }

    /// Every violated inequality, empty when the ladder is admissible.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.c.len() != self.k as usize || self.d.len() != self.k as usize + 1 {
            out.push("ladder has the wrong number of constants".to_string());
            return out;
        }
        if self.c.iter().chain(&self.d).any(|v| !v.is_positive_int()) {
            out.push("all constants must be positive".to_string());
            return out;
        }
        for t in 1..self.k {
            out.extend(self.stage_violations(t));
        }
        out.extend(self.seed_violations());
        out.extend(self.final_violations());
        out
    }

    pub fn is_admissible(&self) -> bool {
        self.violations().is_empty()
    }
}

trait PositiveInt {
    fn is_positive_int(&self) -> bool;
}

impl PositiveInt for BigInt {
    fn is_positive_int(&self) -> bool {
        self > &BigInt::zero()
    }
}

impl fmt::Display for ConstantLadder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &BigInt| {
            let bits = v.bits();
            if bits > 64 && v == &pow2(bits - 1) {
                format!("2^{}", bits - 1)
            } else {
                v.to_string()
            }
        };
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .map(|(i, v)| format!("C{i}={}", show(v)))
            .chain(self.d.iter().enumerate().map(|(i, v)| format!("D{i}={}", show(v))))
            .collect();
        f.write_str(&parts.join(","))
    }
}
