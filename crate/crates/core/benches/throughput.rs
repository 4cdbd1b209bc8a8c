//! Random verification suites on the rayon pool against the same suites on
//! one thread. Without the `parallel` feature both paths are sequential.

use std::hint::black_box;

use balanced_g::verify::{random_suite, random_suite_sequential, Identity};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn suites(c: &mut Criterion) {
    let cases = [
        (Identity::Lemma21, 200),
        (Identity::Thm22, 30),
        (Identity::Eq42, 20),
        (Identity::Thm51, 8),
    ];
    let mut group = c.benchmark_group("random_suite");
    group.sample_size(10);
    for (id, count) in cases {
        group.bench_with_input(BenchmarkId::new("parallel", id.name()), &count, |b, &n| {
            b.iter(|| random_suite(black_box(id), n, 7, id.default_tol()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", id.name()), &count, |b, &n| {
            b.iter(|| random_suite_sequential(black_box(id), n, 7, id.default_tol()))
        });
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
