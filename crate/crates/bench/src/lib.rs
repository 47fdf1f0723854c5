//! Seeded inputs shared by the benchmarks.

use chrono::{Days, NaiveDate};
use moodcast::linalg::Matrix;
use moodcast::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform noise in `[-1, 1)`.
pub fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// `y = X b + e` with `k` regressors.
pub fn regression(n: usize, k: usize, seed: u64) -> (Vec<f64>, Matrix) {
    let cols: Vec<Vec<f64>> = (0..k).map(|j| noise(n, seed * 31 + j as u64)).collect();
    let e = noise(n, seed * 31 + 99);
    let y = (0..n)
        .map(|i| {
            0.5 + cols
                .iter()
                .enumerate()
                .map(|(j, c)| (j as f64 + 1.0) * c[i])
                .sum::<f64>()
                + e[i]
        })
        .collect();
    (y, Matrix::from_columns(&cols))
}

/// An AR(1) driver `x` and a response `d` that follows `x` at `lag`.
pub fn coupled_pair(n: usize, lag: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let shocks = noise(n, seed);
    let mut x = vec![0.0; n];
    for t in 1..n {
        x[t] = 0.7 * x[t - 1] + shocks[t];
    }
    let e = noise(n, seed + 1);
    let d = (0..n)
        .map(|t| if t >= lag { 3.0 * x[t - lag] } else { 0.0 } + e[t])
        .collect();
    (d, x)
}

pub fn daily_series(n: usize, seed: u64) -> TimeSeries {
    let start = NaiveDate::from_ymd_opt(2008, 1, 1).expect("valid date");
    let points = noise(n, seed)
        .into_iter()
        .enumerate()
        .map(|(i, v)| (start + Days::new(i as u64), v))
        .collect();
    TimeSeries::new(points).expect("dates are increasing")
}

/// The 21 x 21 grid on `[0, 1]^2` with target `sin(pi x1) sin(pi x2)`.
pub fn sin_grid() -> Vec<(Vec<f64>, f64)> {
    let pi = std::f64::consts::PI;
    let mut out = Vec::with_capacity(441);
    for i in 0..21 {
        for j in 0..21 {
            let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
            out.push((vec![a, b], (pi * a).sin() * (pi * b).sin()));
        }
    }
    out
}
