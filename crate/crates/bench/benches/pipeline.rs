use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pinch_bench::{configs, CASES};
use pinch_core::quadrature::{integrate_piecewise, kernel_segments};
use pinch_core::threshold::{find_threshold_with, ThresholdOptions};
use pinch_core::{kernel_phi, PsiVariant, RadialCoordinate};

fn kernel_eval(c: &mut Criterion) {
    let config = &configs()[0];
    let rho = RadialCoordinate::new(1.3).unwrap();
    c.bench_function("kernel_phi", |b| {
        b.iter(|| kernel_phi(black_box(config), black_box(rho)))
    });
}

fn segments(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_segments");
    for (config, (n, d)) in configs().iter().zip(CASES) {
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_d{d}")), config, |b, cfg| {
            b.iter(|| kernel_segments(black_box(cfg)))
        });
    }
    group.finish();
}

fn integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_piecewise");
    for (config, (n, d)) in configs().iter().zip(CASES) {
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_d{d}")), config, |b, cfg| {
            b.iter(|| integrate_piecewise(black_box(cfg), 1e-10).unwrap())
        });
    }
    group.finish();
}

fn threshold(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_threshold");
    group.sample_size(10);
    let options = ThresholdOptions::default();
    group.bench_function("n5_listing", |b| {
        b.iter(|| find_threshold_with(black_box(5), PsiVariant::Listing, &options).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kernel_eval, segments, integral, threshold);
criterion_main!(benches);
