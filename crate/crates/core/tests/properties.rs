mod common;

use std::cmp::Ordering;

use common::*;
use kwise_core::arith::{gcd_tuple, kwise_coprime, primes_up_to, primorial, vandermonde};
use kwise_core::rigor::{compare_value, eval_enclosure, floor_frac, taylor_residual_check, RootSum};
use kwise_core::{check_conditions, parse_function, verify_window, BigInt, BigRational, PowerSumExpr, Precision};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (
        prop_oneof![-9i64..=-1, 1i64..=9],
        1i64..=6,
        -4i64..=12,
        1i64..=4,
    )
}

fn render(terms: &[(i64, i64, i64, i64)], surd: bool) -> String {
    let root = if surd { "sqrt(2)*" } else { "" };
    terms
        .iter()
        .map(|(c, d, a, b)| format!("{c}/{d}*{root}x^({a}/{b})"))
        .collect::<Vec<_>>()
        .join(" + ")
        .replace("+ -", "- ")
}

fn power_sum() -> impl Strategy<Value = PowerSumExpr> {
    (prop::collection::vec(term(), 1..=4), any::<bool>())
        .prop_map(|(terms, surd)| parse_function(&render(&terms, surd)).unwrap())
}

/// Positive coefficients and exponents above 1: convex and increasing on `x ≥ 1`.
fn convex_sum() -> impl Strategy<Value = PowerSumExpr> {
    prop::collection::vec((1i64..=9, 1i64..=6, 5i64..=12, 1i64..=4), 1..=3).prop_map(|terms| {
        let terms: Vec<_> = terms.into_iter().map(|(c, d, a, b)| (c, d, a.max(b + 1), b)).collect();
        parse_function(&render(&terms, false)).unwrap()
    })
}

fn prec() -> Precision {
    Precision::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_round_trips(f in power_sum()) {
        let again = parse_function(&f.to_string()).unwrap();
        prop_assert_eq!(again, f);
    }

    #[test]
    fn derivatives_compose(f in power_sum(), i in 0u32..4, j in 0u32..4) {
        prop_assert_eq!(f.differentiate(i + j), f.differentiate(i).differentiate(j));
    }

    #[test]
    fn derivative_is_linear(a in prop::collection::vec(term(), 1..=3), b in prop::collection::vec(term(), 1..=3), i in 0u32..4) {
        let f = parse_function(&render(&a, false)).unwrap();
        let g = parse_function(&render(&b, false)).unwrap();
        let sum = f.add(&g).unwrap();
        prop_assert_eq!(sum.differentiate(i), f.differentiate(i).add(&g.differentiate(i)).unwrap());
    }

    #[test]
    fn enclosures_nest(f in power_sum(), x in 1i64..1_000_000, bits in 8u32..128) {
        let x = big(x);
        let coarse = eval_enclosure(&f, &x, bits, 1 << 12).unwrap();
        let fine = eval_enclosure(&f, &x, bits * 2, 1 << 12).unwrap();
        prop_assert!(coarse.contains_enclosure(&fine), "{coarse} does not contain {fine}");
        prop_assert!(coarse.lo() <= coarse.hi());
    }

    #[test]
    fn enclosure_contains_float(f in power_sum(), x in 1i64..10_000) {
        let e = eval_enclosure(&f, &big(x), 64, 1 << 12).unwrap();
        let v = f.eval_f64(x as f64);
        let slack = 1e-9 * (1.0 + v.abs());
        prop_assert!(e.approx() - slack <= v && v <= e.approx() + slack, "{e} vs {v}");
    }

    #[test]
    fn floor_brackets_value(f in power_sum(), x in 1i64..1_000_000, order in 0u32..3) {
        let x = big(x);
        let ff = match floor_frac(&f, &x, order, prec()) {
            Ok(ff) => ff,
            Err(e) => {
                // Only values within 2^{-cap} of an integer are undecidable.
                let undecidable = matches!(e, kwise_core::EvalError::Undecidable { .. });
                prop_assert!(undecidable, "{}", e);
                return Ok(());
            }
        };
        let lo = BigRational::from_integer(ff.floor_part.clone());
        let hi = BigRational::from_integer(&ff.floor_part + 1);
        prop_assert_ne!(compare_value(&f, &x, order, &lo, prec()).unwrap(), Ordering::Less);
        prop_assert_eq!(compare_value(&f, &x, order, &hi, prec()).unwrap(), Ordering::Less);
        prop_assert!(ff.frac.lo() >= &BigRational::zero() && ff.frac.hi() <= &BigRational::one());
    }

    #[test]
    fn convex_mean_value(f in convex_sum(), x in 1i64..1_000_000) {
        // f' increasing, so f'(x) < f(x+1) − f(x) < f'(x+1).
        let x = big(x);
        let next = &x + 1;
        let step = RootSum::point(&f, &next).unwrap().minus(&RootSum::point(&f, &x).unwrap());
        let d = f.differentiate(1);
        let below = step.clone().minus(&RootSum::point(&d, &x).unwrap());
        let above = RootSum::point(&d, &next).unwrap().minus(&step);
        prop_assert_eq!(below.cmp_rational(&BigRational::zero(), prec()).unwrap(), Ordering::Greater);
        prop_assert_eq!(above.cmp_rational(&BigRational::zero(), prec()).unwrap(), Ordering::Greater);
    }

    #[test]
    fn gcd_ignores_order_and_grouping(mut v in prop::collection::vec(-10_000i64..10_000, 2..8), split in 1usize..7) {
        prop_assume!(v.iter().any(|&x| x != 0));
        let all: Vec<BigInt> = v.iter().map(|&x| big(x)).collect();
        let g = gcd_tuple(&all).unwrap();
        v.reverse();
        let rev: Vec<BigInt> = v.iter().map(|&x| big(x)).collect();
        prop_assert_eq!(gcd_tuple(&rev).unwrap(), g.clone());
        let split = split.min(all.len() - 1);
        let parts: Vec<BigInt> = [&all[..split], &all[split..]]
            .iter()
            .map(|p| p.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)))
            .collect();
        prop_assert_eq!(gcd_tuple(&parts).unwrap(), g.clone());
        prop_assert!(all.iter().all(|x| x.is_multiple_of(&g)));
    }

    #[test]
    fn kwise_is_monotone(v in prop::collection::vec(1i64..200, 2..9), k in 1usize..8) {
        let values: Vec<BigInt> = v.iter().map(|&x| big(x)).collect();
        let here = kwise_coprime(&values, k);
        let next = kwise_coprime(&values, k + 1);
        if here.coprime {
            prop_assert!(next.coprime);
        }
        if let Some(s) = here.failing_subset {
            prop_assert_eq!(s.len(), k);
            let g = s.iter().fold(BigInt::zero(), |acc, &i| acc.gcd(&values[i]));
            prop_assert!(g > BigInt::one());
        }
    }

    #[test]
    fn vandermonde_inverts(mut nodes in prop::collection::btree_set(1i64..=20, 1..=6), coeffs in prop::collection::vec(-50i64..50, 6)) {
        let nodes: Vec<i64> = std::mem::take(&mut nodes).into_iter().collect();
        let system = vandermonde(&nodes).unwrap();
        prop_assert!(system.verify());
        let mut product = BigInt::one();
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                product *= nodes[j] - nodes[i];
            }
        }
        prop_assert_eq!(&system.det, &product);
        let c: Vec<BigInt> = coeffs[..nodes.len()].iter().map(|&x| big(x)).collect();
        let rhs: Vec<BigInt> = system
            .matrix()
            .iter()
            .map(|row| row.iter().zip(&c).map(|(a, b)| a * b).sum())
            .collect();
        let solved = system.scaled_solve(&rhs);
        let expected: Vec<BigInt> = c.iter().map(|x| x * &system.det).collect();
        prop_assert_eq!(solved, expected);
    }

    #[test]
    fn primorial_is_squarefree(h in 1u64..200) {
        let mut rest = primorial(h);
        for p in primes_up_to(h) {
            let p = BigInt::from(p);
            prop_assert!(rest.is_multiple_of(&p));
            rest /= &p;
            prop_assert!(!rest.is_multiple_of(&p));
        }
        prop_assert!(rest.is_one());
    }

    #[test]
    fn taylor_remainder_is_bounded(f in power_sum(), n in 1i64..1_000_000, h in 1u64..10, k in 1u32..5) {
        let check = taylor_residual_check(&f, &big(n), h, k, prec()).unwrap();
        prop_assert!(check.holds, "residual {} exceeds {}", check.residual, check.bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificates_are_sound(f in power_sum(), n in 1i64..100_000, k in 2u32..4, extra in 0u64..3) {
        let h = k as u64 + extra;
        let cert = check_conditions(&f, &big(n), k, h, prec()).unwrap();
        if cert.all_true() {
            let report = verify_window(&f, &big(n), k, h, prec()).unwrap();
            prop_assert!(report.kwise_coprime && report.reconstruction_matches == Some(true));
        }
    }

    #[test]
    fn synthetic_certificates_hold(k in 2u32..4, extra in 0u64..3, m_extra in 2u32..40, offset in any::<u64>()) {
        let h = k as u64 + extra;
        let m = 8 * k + m_extra;
        let f = synthetic_family(k, h, m);
        let (lo, hi) = synthetic_range(k, m);
        let span = &hi - &lo - 1 - h;
        prop_assume!(span > BigInt::zero());
        let n = &lo + 1 + BigInt::from(offset).mod_floor(&span);
        let cert = check_conditions(&f, &n, k, h, prec()).unwrap();
        prop_assert!(cert.all_true(), "n = {} fails {:?}", n, cert.failed_conditions());
        let report = verify_window(&f, &n, k, h, prec()).unwrap();
        prop_assert!(report.consistent() && report.kwise_coprime);
    }
}
