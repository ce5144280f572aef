use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kwise_core::rigor::floor_frac;
use kwise_core::search::{brute_scan, construct_witness_with, ConstructOptions, ScanMode, ScanOptions};
use kwise_core::{build_constants, check_conditions, parse_function, BigInt, LadderOverrides, Precision};

fn eval(c: &mut Criterion) {
    let f = parse_function("x^(3/2) + 1/3*x^(7/4) - sqrt(2)*x^(1/3)").unwrap();
    let x: BigInt = "123456789012345678901234567890".parse().unwrap();
    let prec = Precision::default();
    c.bench_function("floor_frac/order0", |b| b.iter(|| floor_frac(black_box(&f), black_box(&x), 0, prec).unwrap()));
    c.bench_function("floor_frac/order2", |b| b.iter(|| floor_frac(black_box(&f), black_box(&x), 2, prec).unwrap()));
}

fn certificate(c: &mut Criterion) {
    let f = parse_function("x^1.5").unwrap();
    let n = BigInt::from(10u64).pow(12);
    c.bench_function("check_conditions/k3_h6", |b| {
        b.iter(|| check_conditions(black_box(&f), black_box(&n), 3, 6, Precision::default()).unwrap())
    });
}

fn scan(c: &mut Criterion) {
    let f = parse_function("x^1.5").unwrap();
    let options = ScanOptions {
        mode: ScanMode::Kwise,
        jobs: 1,
        keep_rejections: false,
        prec: Precision::default(),
    };
    let (lo, hi) = (BigInt::from(2), BigInt::from(2000));
    c.bench_function("brute_scan/2000", |b| b.iter(|| brute_scan(&f, 2, 3, &lo, &hi, &options).unwrap()));
}

fn witness(c: &mut Criterion) {
    let f = parse_function("x^1.5").unwrap();
    let small: LadderOverrides = "C0=2^10,C1=2^13,D0=8,D1=2^11,D2=2^67".parse().unwrap();
    let small = build_constants(2, 2, Some(&small)).unwrap();
    let default = build_constants(2, 2, None).unwrap();
    let prec = Precision::default();
    let options = ConstructOptions::default();
    let mut group = c.benchmark_group("construct_witness");
    group.sample_size(10);
    group.bench_function("small_ladder", |b| {
        b.iter(|| construct_witness_with(&f, 2, 2, Some(&small), prec, &options).unwrap())
    });
    group.bench_function("default_ladder", |b| {
        b.iter(|| construct_witness_with(&f, 2, 2, Some(&default), prec, &options).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eval, certificate, scan, witness);
criterion_main!(benches);
