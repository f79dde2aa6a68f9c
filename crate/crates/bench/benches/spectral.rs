use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracrev::dynamics::Evolution;
use fracrev::spectral::eigensystem;
use fracrev_bench::reference_matrix;

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigensystem");
    for n in [5usize, 21, 101, 201] {
        let m = reference_matrix(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| eigensystem(std::hint::black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve_column");
    for n in [5usize, 21, 101] {
        let ev = Evolution::new(&reference_matrix(n)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &ev, |b, ev| {
            b.iter(|| ev.from_first_site(std::hint::black_box(6.0 * PI)))
        });
    }
    group.finish();
}

criterion_group!(benches, eigensolver, evolution);
criterion_main!(benches);
