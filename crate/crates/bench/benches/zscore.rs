use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use moodcast::timeseries::{zscore_local, Window};
use moodcast_bench::daily_series;

fn bench_zscore(c: &mut Criterion) {
    let s = daily_series(10_000, 3);
    let mut group = c.benchmark_group("zscore_10k");
    for k in [7, 30] {
        group.bench_with_input(BenchmarkId::new("centered", k), &k, |b, &k| {
            b.iter(|| zscore_local(&s, k, Window::Centered).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("trailing", k), &k, |b, &k| {
            b.iter(|| zscore_local(&s, k, Window::Trailing).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_zscore);
criterion_main!(benches);
