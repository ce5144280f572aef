//! Exact integer utilities: primes, primorials, tuple gcds, k-wise coprimality,
//! integer-scaled Vandermonde inverses and enclosures of `1/ζ(s)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::rigor::Enclosure;

/// Primes `≤ limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
    }
    primes
}

/// `Π_H`: product of the primes `≤ h` (empty product 1).
pub fn primorial(h: u64) -> BigInt {
    primes_up_to(h).into_iter().fold(BigInt::one(), |acc, p| acc * p)
}

pub fn factorial(k: u64) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// The modulus `k! · Π_H` shared by the certificate and the ladder.
pub fn ladder_modulus(k: u32, h: u64) -> BigInt {
    factorial(k as u64) * primorial(h)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("gcd of an empty tuple")]
    EmptyTuple,
    #[error("gcd of an all-zero tuple is undefined")]
    AllZero,
    #[error("Vandermonde nodes must be strictly increasing")]
    NodesNotIncreasing,
    #[error("zeta argument must be at least 2 and the tolerance positive")]
    ZetaDomain,
}

/// Nonnegative gcd of a nonempty tuple that is not entirely zero.
pub fn gcd_tuple(values: &[BigInt]) -> Result<BigInt, ArithError> {
    if values.is_empty() {
        return Err(ArithError::EmptyTuple);
    }
    let g = values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return Err(ArithError::AllZero);
    }
    Ok(g)
}

/// Result of a k-wise coprimality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KwiseOutcome {
    pub coprime: bool,
    /// Indices of the lexicographically first k-subset with gcd > 1.
    pub failing_subset: Option<Vec<usize>>,
}

/// True iff every `k`-element subset of `values` has gcd 1.
///
/// Depth-first over subsets in lexicographic order; a prefix whose gcd is
/// already 1 prunes its whole subtree. Requires `k ≥ 1`; when
/// `k > values.len()` there is no subset and the check holds vacuously.
pub fn kwise_coprime(values: &[BigInt], k: usize) -> KwiseOutcome {
    assert!(k >= 1, "k must be positive");
    let mut stack = Vec::with_capacity(k);
    let failing = search_subset(values, k, 0, &BigInt::zero(), &mut stack);
    KwiseOutcome {
        coprime: failing.is_none(),
        failing_subset: failing,
    }
}

fn search_subset(
    values: &[BigInt],
    k: usize,
    start: usize,
    prefix_gcd: &BigInt,
    chosen: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if chosen.len() == k {
        return (!prefix_gcd.is_one()).then(|| chosen.clone());
    }
    let remaining = k - chosen.len();
    for i in start..values.len() {
        if values.len() - i < remaining {
            break;
        }
        let g = prefix_gcd.gcd(&values[i]);
        if g.is_one() {
            continue;
        }
        chosen.push(i);
        if let Some(found) = search_subset(values, k, i + 1, &g, chosen) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

/// Smallest prime `p ≤ bound` dividing `n`, by trial division.
pub fn smallest_prime_factor(n: &BigInt, bound: u64) -> Option<u64> {
    let n = n.abs();
    if n <= BigInt::one() {
        return None;
    }
    let mut p = 2u64;
    while p <= bound {
        if BigInt::from(p) * p > n {
            return n.to_u64().filter(|v| *v <= bound);
        }
        if (&n % p).is_zero() {
            return Some(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    None
}

/// First window element divisible by a prime `≤ h`, as `(prime, index)`.
pub fn small_prime_divisor(floors: &[BigInt], h: u64) -> Option<(u64, usize)> {
    let primes = primes_up_to(h);
    floors.iter().enumerate().find_map(|(i, v)| {
        primes
            .iter()
            .find(|&&p| (v % BigInt::from(p)).is_zero())
            .map(|&p| (p, i))
    })
}

/// True iff no prime `p ≤ h` divides any of `floors`.
pub fn small_prime_nondivisibility(floors: &[BigInt], h: u64) -> bool {
    small_prime_divisor(floors, h).is_none()
}

/// Vandermonde matrix `V = (h_i^{j})` on increasing nodes, its determinant
/// and the integer matrix `det(V) · V^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VandermondeSystem {
    pub nodes: Vec<i64>,
    #[serde(serialize_with = "crate::json::display")]
    pub det: BigInt,
    #[serde(skip)]
    pub scaled_inverse: Vec<Vec<BigInt>>,
}

impl VandermondeSystem {
    pub fn matrix(&self) -> Vec<Vec<BigInt>> {
        vandermonde_matrix(&self.nodes)
    }

    /// `V · scaled_inverse == det · I`.
    pub fn verify(&self) -> bool {
        let v = self.matrix();
        let k = self.nodes.len();
        (0..k).all(|i| {
            (0..k).all(|j| {
                let entry: BigInt = (0..k).map(|l| &v[i][l] * &self.scaled_inverse[l][j]).sum();
                let expected = if i == j { self.det.clone() } else { BigInt::zero() };
                entry == expected
            })
        })
    }

    /// `det · V^{-1} · rhs`.
    pub fn scaled_solve(&self, rhs: &[BigInt]) -> Vec<BigInt> {
        self.scaled_inverse
            .iter()
            .map(|row| row.iter().zip(rhs).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn vandermonde_matrix(nodes: &[i64]) -> Vec<Vec<BigInt>> {
    nodes
        .iter()
        .map(|&h| {
            let mut row = Vec::with_capacity(nodes.len());
            let mut p = BigInt::one();
            for _ in 0..nodes.len() {
                row.push(p.clone());
                p *= h;
            }
            row
        })
        .collect()
}

/// Exact inverse by Gauss–Jordan over the rationals, cleared by `det(V)`.
pub fn vandermonde(nodes: &[i64]) -> Result<VandermondeSystem, ArithError> {
    if nodes.is_empty() || nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ArithError::NodesNotIncreasing);
    }
    let k = nodes.len();
    let det: BigInt = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| BigInt::from(nodes[j] - nodes[i]))
        .product();

    let v = vandermonde_matrix(nodes);
    let mut a: Vec<Vec<BigRational>> = v
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().cloned().map(BigRational::from_integer).collect();
            r.extend((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero()).expect("Vandermonde matrix is nonsingular");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
    }
    let det_q = BigRational::from_integer(det.clone());
    let scaled_inverse = a
        .into_iter()
        .map(|row| {
            row[k..]
                .iter()
                .map(|x| {
                    let s = x * &det_q;
                    debug_assert!(s.is_integer());
                    s.to_integer()
                })
                .collect()
        })
        .collect();
    Ok(VandermondeSystem {
        nodes: nodes.to_vec(),
        det,
        scaled_inverse,
    })
}

/// Enclosure of `1/ζ(s)` of width at most `tol`.
///
/// `ζ(s) = Σ_{n≤N} n^{-s} + tail` with
/// `1/((s−1)(N+1)^{s−1}) < tail < 1/((s−1)N^{s−1})`; partial sums are
/// accumulated in fixed point with directed rounding.
pub fn zeta_inverse(s: u32, tol: f64) -> Result<Enclosure, ArithError> {
    if s < 2 || !(tol > 0.0) || !tol.is_finite() {
        return Err(ArithError::ZetaDomain);
    }
    let tol_q = BigRational::from_float(tol).ok_or(ArithError::ZetaDomain)?;
    let quarter = &tol_q / BigRational::from_integer(4.into());
    let mut n_terms: u64 = 16;
    loop {
        // Tail width ≤ N^{-s}; rounding error ≤ N · 2^{-bits}.
        let tail_width = BigRational::new(BigInt::one(), BigInt::from(n_terms).pow(s));
        if tail_width > quarter {
            n_terms *= 2;
            continue;
        }
        let mut bits: u64 = 64;
        while BigRational::new(BigInt::from(n_terms), BigInt::one() << bits) > quarter {
            bits += 16;
        }
        let enc = zeta_inverse_with(s, n_terms, bits);
        if enc.width() <= tol_q {
            return Ok(enc);
        }
        n_terms *= 2;
    }
}

fn zeta_inverse_with(s: u32, n_terms: u64, bits: u64) -> Enclosure {
    let one = BigUint::one() << bits;
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    for n in 1..=n_terms {
        let d = BigUint::from(n).pow(s);
        let (q, r) = one.div_rem(&d);
        if !r.is_zero() {
            hi += 1u32;
        }
        lo += &q;
        hi += q;
    }
    let scale = BigInt::one() << bits;
    let sm1 = BigInt::from(s - 1);
    let tail_lo = BigRational::new(BigInt::one(), &sm1 * BigInt::from(n_terms + 1).pow(s - 1));
    let tail_hi = BigRational::new(BigInt::one(), &sm1 * BigInt::from(n_terms).pow(s - 1));
    let zeta_lo = BigRational::new(lo.into(), scale.clone()) + tail_lo;
    let zeta_hi = BigRational::new(hi.into(), scale) + tail_hi;
    Enclosure::new(zeta_hi.recip(), zeta_lo.recip(), bits as u32).expect("ordered")
}

/// Möbius function on `0..=n` (index 0 unused).
pub fn mobius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    if n == 0 {
        return mu;
    }
    mu[0] = 0;
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        let mut m = p;
        while m <= n {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
            m += p;
        }
        let sq = p.saturating_mul(p);
        let mut m = sq;
        while m <= n {
            mu[m] = 0;
            m += sq;
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primorial_examples() {
        assert_eq!(primorial(1), BigInt::from(1));
        assert_eq!(primorial(5), BigInt::from(30));
        assert_eq!(primorial(10), BigInt::from(210));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_tuple(&b(&[6, 10, 15])).unwrap(), BigInt::from(1));
        assert_eq!(gcd_tuple(&b(&[4, 8, 12])).unwrap(), BigInt::from(4));
        assert_eq!(gcd_tuple(&b(&[5, 8, 11])).unwrap(), BigInt::from(1));
        assert_eq!(gcd_tuple(&b(&[-4, 6])).unwrap(), BigInt::from(2));
        assert_eq!(gcd_tuple(&b(&[0, 0])), Err(ArithError::AllZero));
        assert_eq!(gcd_tuple(&[]), Err(ArithError::EmptyTuple));
    }

    #[test]
    fn kwise_examples() {
        let r = kwise_coprime(&b(&[2, 5, 8]), 2);
        assert!(!r.coprime);
        assert_eq!(r.failing_subset, Some(vec![0, 2]));
        assert!(kwise_coprime(&b(&[5, 8, 11]), 2).coprime);
        assert!(kwise_coprime(&b(&[6, 10, 15]), 3).coprime);
        let r = kwise_coprime(&b(&[6, 10, 15]), 2);
        assert!(!r.coprime);
        assert_eq!(r.failing_subset, Some(vec![0, 1]));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(&[1, 2]).unwrap().det, BigInt::from(1));
        assert_eq!(vandermonde(&[1, 2, 3]).unwrap().det, BigInt::from(2));
        let v = vandermonde(&[1, 2, 4]).unwrap();
        assert_eq!(v.det, BigInt::from(6));
        assert!(v.verify());
        assert_eq!(vandermonde(&[1, 1]), Err(ArithError::NodesNotIncreasing));
    }

    #[test]
    fn small_prime_examples() {
        assert!(small_prime_nondivisibility(&b(&[4101, 4105]), 2));
        assert!(!small_prime_nondivisibility(&b(&[6, 35]), 3));
        assert_eq!(small_prime_divisor(&b(&[6, 35]), 3), Some((2, 0)));
        assert!(small_prime_nondivisibility(&b(&[1]), 100));
    }

    #[test]
    fn zeta_examples() {
        let z2 = zeta_inverse(2, 1e-9).unwrap();
        let six_over_pi2 = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(z2.lo().to_f64().unwrap() <= six_over_pi2 + 1e-15);
        assert!(z2.hi().to_f64().unwrap() >= six_over_pi2 - 1e-15);
        assert!(z2.width() <= BigRational::from_float(1e-9).unwrap());

        let z3 = zeta_inverse(3, 1e-9).unwrap();
        assert!((z3.approx() - 0.831_907_372_580_707_5).abs() < 1e-9);

        let coarse = zeta_inverse(2, 0.5).unwrap();
        assert!(coarse.lo().to_f64().unwrap() <= six_over_pi2 && coarse.hi().to_f64().unwrap() >= six_over_pi2);
        assert_eq!(zeta_inverse(1, 0.1), Err(ArithError::ZetaDomain));
    }

    #[test]
    fn mobius_values() {
        let mu = mobius_sieve(12);
        assert_eq!(&mu[1..], &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn smallest_factor() {
        assert_eq!(smallest_prime_factor(&BigInt::from(91), 100), Some(7));
        assert_eq!(smallest_prime_factor(&BigInt::from(97), 100), Some(97));
        assert_eq!(smallest_prime_factor(&BigInt::from(1), 100), None);
        assert_eq!(smallest_prime_factor(&BigInt::from(101 * 103), 100), None);
    }
}
