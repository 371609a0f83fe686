use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use iets_bench::{exp_equals_identity, exp_minus_identity};
use iets_core::generic::find_integer_relation;
use iets_core::solver::{certify_seed, default_schedule, enumerate_roots, SolveOptions};
use iets_core::verify::{count_zeros, Rect};

fn certification(c: &mut Criterion) {
    let s = exp_equals_identity();
    let mut group = c.benchmark_group("certify_seed");
    for t in [16u64, 256, 4096] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| certify_seed(black_box(&s), &[1], t).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let s = exp_equals_identity();
    let opts = SolveOptions {
        schedule: default_schedule(1 << 10),
        ..SolveOptions::default()
    };
    c.bench_function("enumerate 8 roots of e^z = z", |b| {
        b.iter(|| enumerate_roots(black_box(&s), 8, &opts).unwrap())
    });
}

fn relation_search(c: &mut Criterion) {
    // log 2 + log 3 − log 6 = 0, hidden among unrelated values
    let values: Vec<Complex64> = [2.0f64, 3.0, 6.0, 7.0, 11.0]
        .iter()
        .map(|v| Complex64::new(v.ln(), 0.0))
        .collect();
    c.bench_function("integer relation, 5 values, 30 digits", |b| {
        b.iter(|| find_integer_relation(black_box(&values), 10, 30))
    });
}

fn zero_count(c: &mut Criterion) {
    let t = exp_minus_identity();
    let rect = Rect::new((-1.0, 3.0), (0.0, 10.0)).unwrap();
    c.bench_function("argument principle on [-1,3]x[0,10]", |b| {
        b.iter(|| count_zeros(black_box(&t), rect).unwrap())
    });
}

criterion_group!(benches, certification, enumeration, relation_search, zero_count);
criterion_main!(benches);
