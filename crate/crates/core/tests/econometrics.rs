use moodcast::econometrics::{granger_lag, nested_f_test, ols};
use moodcast::linalg::Matrix;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}

/// Solves `A x = b` by Gauss-Jordan elimination with partial pivoting and
/// also returns `A^-1`.
fn solve_with_inverse(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.push(b[i]);
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    let src = m[c].clone();
                    for (v, s) in m[r].iter_mut().zip(src) {
                        *v -= f * s;
                    }
                }
            }
        }
    }
    let x = m.iter().map(|r| r[n]).collect();
    let inv = m.iter().map(|r| r[n + 1..].to_vec()).collect();
    (x, inv)
}

struct Oracle {
    beta: Vec<f64>,
    se: Vec<f64>,
    p: Vec<f64>,
    rss: f64,
    f_p: f64,
}

fn oracle(y: &[f64], cols: &[Vec<f64>]) -> Oracle {
    let n = y.len();
    let k = cols.len() + 1;
    let design: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            std::iter::once(1.0)
                .chain(cols.iter().map(|c| c[i]))
                .collect()
        })
        .collect();
    let xtx: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| (0..n).map(|i| design[i][a] * design[i][b]).sum())
                .collect()
        })
        .collect();
    let xty: Vec<f64> = (0..k)
        .map(|a| (0..n).map(|i| design[i][a] * y[i]).sum())
        .collect();
    let (beta, inv) = solve_with_inverse(&xtx, &xty);
    let rss: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..k).map(|j| design[i][j] * beta[j]).sum();
            (y[i] - fit).powi(2)
        })
        .sum();
    let df = (n - k) as f64;
    let s2 = rss / df;
    let se: Vec<f64> = (0..k).map(|j| (s2 * inv[j][j]).sqrt()).collect();
    let t = StudentsT::new(0.0, 1.0, df).unwrap();
    let p = (0..k)
        .map(|j| 2.0 * t.sf((beta[j] / se[j]).abs()))
        .collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let f = ((tss - rss) / (k - 1) as f64) / s2;
    let f_p = FisherSnedecor::new((k - 1) as f64, df).unwrap().sf(f);
    Oracle {
        beta,
        se,
        p,
        rss,
        f_p,
    }
}

#[test]
fn ols_matches_normal_equations() {
    let mut rng = Lcg(2024);
    for problem in 0..20 {
        let n = 50;
        let k = 1 + problem % 7;
        let cols: Vec<Vec<f64>> = (0..k).map(|_| rng.vec(n)).collect();
        let e = rng.vec(n);
        let y: Vec<f64> = (0..n)
            .map(|i| {
                0.3 + cols
                    .iter()
                    .enumerate()
                    .map(|(j, c)| 0.4 * (j as f64 - 2.0) * c[i])
                    .sum::<f64>()
                    + e[i]
            })
            .collect();
        let fit = ols(&y, &Matrix::from_columns(&cols), None).unwrap();
        let o = oracle(&y, &cols);
        for j in 0..=k {
            assert!(
                (fit.coefficients[j] - o.beta[j]).abs() < 1e-8,
                "problem {problem} coef {j}"
            );
            assert!(
                (fit.std_errors[j] - o.se[j]).abs() < 1e-8,
                "problem {problem} se {j}"
            );
            assert!(
                (fit.p_values[j] - o.p[j]).abs() < 1e-6,
                "problem {problem} p {j}"
            );
        }
        assert!((fit.rss - o.rss).abs() < 1e-8);
        assert!((fit.f_p_value - o.f_p).abs() < 1e-6);
    }
}

#[test]
fn collinear_design_is_rejected() {
    let mut rng = Lcg(3);
    let a = rng.vec(30);
    let b: Vec<f64> = a.iter().map(|v| 2.0 * v + 1.0).collect();
    let y = rng.vec(30);
    assert!(ols(&y, &Matrix::from_columns(&[a, b]), None).is_err());
}

#[test]
fn granger_equals_explicit_nested_test() {
    let mut rng = Lcg(77);
    let n = 120;
    let x = rng.vec(n);
    let e = rng.vec(n);
    let d: Vec<f64> = (0..n)
        .map(|t| if t >= 2 { 0.8 * x[t - 2] } else { 0.0 } + e[t])
        .collect();
    for lag in 1..=4 {
        let row = granger_lag(&d, &x, "x", lag).unwrap();
        let y = &d[lag..];
        let own: Vec<Vec<f64>> = (1..=lag)
            .map(|i| (lag..n).map(|t| d[t - i]).collect())
            .collect();
        let mut both = own.clone();
        both.extend((1..=lag).map(|i| (lag..n).map(|t| x[t - i]).collect::<Vec<f64>>()));
        let r = oracle(y, &own);
        let u = oracle(y, &both);
        let df_den = n - 3 * lag - 1;
        let f = ((r.rss - u.rss) / lag as f64) / (u.rss / df_den as f64);
        let p = FisherSnedecor::new(lag as f64, df_den as f64)
            .unwrap()
            .sf(f);
        assert_eq!((row.df_num, row.df_den, row.n_obs), (lag, df_den, n - lag));
        assert!((row.f_stat - f).abs() < 1e-8 * f.max(1.0), "lag {lag}");
        assert!((row.p_value - p).abs() < 1e-6, "lag {lag}");
        let nested =
            nested_f_test(y, &Matrix::from_columns(&both), &Matrix::from_columns(&own)).unwrap();
        assert!((nested.rss_reduced - r.rss).abs() < 1e-8);
    }
    assert!(granger_lag(&d, &x, "x", 2).unwrap().p_value < 1e-6);
}

#[test]
fn granger_short_series_errors_per_lag() {
    let mut rng = Lcg(1);
    let d = rng.vec(12);
    let x = rng.vec(12);
    assert!(granger_lag(&d, &x, "x", 3).is_ok());
    assert!(granger_lag(&d, &x, "x", 4).is_err());
    assert!(granger_lag(&d, &x[..11], "x", 1).is_err());
}

fn planted(seed: u64, coupling: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = Lcg(seed);
    let n = 500;
    let x = rng.vec(n);
    let mut d = vec![0.0; n];
    for t in 1..n {
        let drive = if t >= 3 { coupling * x[t - 3] } else { 0.0 };
        d[t] = 0.5 * d[t - 1] + drive + 0.5 * rng.next();
    }
    (d, x)
}

#[test]
fn granger_finds_planted_lag_three() {
    for seed in 0..20 {
        let (d, x) = planted(seed, 0.8);
        assert!(
            granger_lag(&d, &x, "x", 3).unwrap().p_value < 0.01,
            "seed {seed}"
        );
    }
}

#[test]
fn granger_null_rejects_rarely_at_each_lag() {
    // counted lag by lag: seven correlated tests jointly reject far more often
    let mut quiet = [0usize; 7];
    for seed in 0..100 {
        let (d, x) = planted(seed, 0.0);
        for lag in 1..=7 {
            if granger_lag(&d, &x, "x", lag).unwrap().p_value > 0.05 {
                quiet[lag - 1] += 1;
            }
        }
    }
    assert!(quiet.iter().all(|&q| q >= 90), "{quiet:?}");
}
