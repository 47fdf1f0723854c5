use serde::{Deserialize, Serialize};

use super::special::{f_sf, student_t_two_sided};
use super::EconError;
use crate::linalg::{Matrix, Qr};

/// Relative size below which an R diagonal marks a collinear column.
const RANK_TOL: f64 = 1e-10;

/// Least-squares fit with classical inference. Index 0 is the intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub rss: f64,
    pub residual_std_err: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_stat: f64,
    pub f_p_value: f64,
    pub f_dof: (usize, usize),
    pub n_obs: usize,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl OlsFit {
    pub fn params(&self) -> usize {
        self.coefficients.len()
    }

    pub fn df_resid(&self) -> usize {
        self.n_obs - self.params()
    }
}

fn default_names(p: usize) -> Vec<String> {
    std::iter::once("const".to_owned())
        .chain((1..=p).map(|j| format!("x{j}")))
        .collect()
}

/// Fits `y = a + X b + e` by Householder QR. `x` is the design without the
/// intercept column; `names`, when given, label its columns.
pub fn ols(y: &[f64], x: &Matrix, names: Option<&[String]>) -> Result<OlsFit, EconError> {
    let n = y.len();
    if x.rows() != n {
        return Err(EconError::LengthMismatch {
            expected: n,
            found: x.rows(),
        });
    }
    let k = x.cols() + 1;
    if n <= k {
        return Err(EconError::InsufficientRows { rows: n, params: k });
    }
    if y.iter().any(|v| !v.is_finite()) || (0..n).any(|i| x.row(i).iter().any(|v| !v.is_finite())) {
        return Err(EconError::NonFinite);
    }
    let names: Vec<String> = match names {
        Some(ns) => {
            if ns.len() != x.cols() {
                return Err(EconError::LengthMismatch {
                    expected: x.cols(),
                    found: ns.len(),
                });
            }
            std::iter::once("const".to_owned())
                .chain(ns.iter().cloned())
                .collect()
        }
        None => default_names(x.cols()),
    };

    let design = x.with_intercept();
    let qr = Qr::new(&design);
    if let Some(col) = qr.deficient_column(RANK_TOL) {
        return Err(EconError::RankDeficient {
            column: col,
            name: names[col].clone(),
        });
    }
    let coefficients = qr.solve(y);
    let fitted = design.mul_vec(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let df = (n - k) as f64;
    let sigma2 = rss / df;

    // Cov(b) = s^2 (R^T R)^{-1} = s^2 R^{-1} R^{-T}
    let rinv = qr.r_inverse();
    let std_errors: Vec<f64> = (0..k)
        .map(|i| {
            let row_ss: f64 = (i..k).map(|j| rinv[(i, j)] * rinv[(i, j)]).sum();
            (sigma2 * row_ss).sqrt()
        })
        .collect();
    let (t_stats, p_values): (Vec<f64>, Vec<f64>) = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| {
            if se > 0.0 {
                let t = b / se;
                (t, student_t_two_sided(t, df))
            } else if b == 0.0 {
                (0.0, 1.0)
            } else {
                (b.signum() * f64::INFINITY, 0.0)
            }
        })
        .unzip();

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { f64::NAN };
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df;
    let q = k - 1;
    let (f_stat, f_p_value) = if q == 0 {
        (0.0, 1.0)
    } else if rss > 0.0 {
        let f = ((tss - rss).max(0.0) / q as f64) / sigma2;
        (f, f_sf(f, q as f64, df))
    } else {
        (f64::INFINITY, 0.0)
    };

    Ok(OlsFit {
        names,
        coefficients,
        std_errors,
        t_stats,
        p_values,
        rss,
        residual_std_err: sigma2.sqrt(),
        r2,
        adj_r2,
        f_stat,
        f_p_value,
        f_dof: (q, n - k),
        n_obs: n,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = ols(&y, &Matrix::from_columns(&[xs]), None).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-10);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-10);
        assert!(fit.rss < 1e-20);
        assert!(fit.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn duplicated_column_named_in_error() {
        let a: Vec<f64> = (0..8).map(|i| (i * i) as f64).collect();
        let b: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let x = Matrix::from_columns(&[a, b.clone(), b]);
        let names = vec!["sq".to_owned(), "lin".to_owned(), "lin_copy".to_owned()];
        let y: Vec<f64> = (0..8).map(|i| (i % 3) as f64).collect();
        match ols(&y, &x, Some(&names)) {
            Err(EconError::RankDeficient { column, name }) => {
                assert_eq!(column, 3);
                assert_eq!(name, "lin_copy");
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let x = Matrix::from_columns(&[vec![1.0, 2.0]]);
        assert!(matches!(
            ols(&[1.0, 2.0], &x, None),
            Err(EconError::InsufficientRows { .. })
        ));
    }

    #[test]
    fn t_is_coef_over_se() {
        let x1: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let y: Vec<f64> = x1
            .iter()
            .enumerate()
            .map(|(i, v)| 0.3 + 1.5 * v + ((i * 7 % 5) as f64 - 2.0) * 0.1)
            .collect();
        let fit = ols(&y, &Matrix::from_columns(&[x1]), None).unwrap();
        for i in 0..fit.params() {
            assert!((fit.t_stats[i] - fit.coefficients[i] / fit.std_errors[i]).abs() < 1e-12);
        }
        assert_eq!(fit.f_dof, (1, 18));
        // with one regressor, F = t^2
        assert!((fit.f_stat - fit.t_stats[1].powi(2)).abs() < 1e-8 * fit.f_stat);
    }
}
