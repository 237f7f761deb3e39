use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use simid_bench::{sparse_mpdag, workload};
use simid_core::{density, identify, mpdag};

fn simultaneous_identify(c: &mut Criterion) {
    let mut group = c.benchmark_group("simultaneous_identify");
    for (n, k) in [(6, 2), (10, 4), (14, 8)] {
        let w = workload(n, k, 11);
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_k{k}")), &w, |b, w| {
            b.iter(|| identify::simultaneous_identify(black_box(&w.set), black_box(&w.query)).unwrap())
        });
    }
    group.finish();
}

fn enumerate_extensions(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_extensions");
    for n in [5, 7, 9] {
        let g = sparse_mpdag(n, 5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| mpdag::enumerate_extensions(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn evaluate_formula(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_formula");
    for n in [4, 8, 12] {
        let mut seed = 0;
        let (w, f) = loop {
            let w = workload(n, 1, seed);
            if let Some(f) = identify::simultaneous_identify(&w.set, &w.query).unwrap().formula {
                break (w, f);
            }
            seed += 1;
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &(w, f), |b, (w, f)| {
            b.iter(|| density::evaluate_formula(black_box(f), &w.density, &w.x).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, simultaneous_identify, enumerate_extensions, evaluate_formula);
criterion_main!(benches);
