use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracrev::params::solve_diophantine;

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_diophantine");
    for alpha1_max in [6u32, 12, 24] {
        group.bench_with_input(BenchmarkId::from_parameter(alpha1_max), &alpha1_max, |b, &m| {
            b.iter(|| solve_diophantine(std::hint::black_box(m)))
        });
    }
    group.finish();
}

criterion_group!(benches, search);
criterion_main!(benches);
