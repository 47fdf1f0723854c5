use criterion::{criterion_group, criterion_main, Criterion};
use moodcast::econometrics::granger_bivariate;
use moodcast_bench::coupled_pair;

fn bench_granger(c: &mut Criterion) {
    let (d, x) = coupled_pair(500, 3, 7);
    let lags: Vec<usize> = (1..=7).collect();
    c.bench_function("granger_lags_1_to_7_t500", |b| {
        b.iter(|| granger_bivariate(&d, &x, "x", &lags))
    });
}

criterion_group!(benches, bench_granger);
criterion_main!(benches);
