use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use moodcast::econometrics::ols;
use moodcast_bench::regression;

fn bench_ols(c: &mut Criterion) {
    let mut group = c.benchmark_group("ols");
    for n in [50, 500, 5000] {
        let (y, x) = regression(n, 7, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| ols(&y, &x, None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ols);
criterion_main!(benches);
