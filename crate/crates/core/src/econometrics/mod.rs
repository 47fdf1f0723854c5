//! Regression and significance testing.

mod granger;
mod ols;
pub mod report;
pub mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use granger::{granger_bivariate, granger_lag, GrangerRow};
pub use ols::{ols, OlsFit};

use crate::lexicons::Dimension;
use crate::linalg::Matrix;
use crate::timeseries::{Column, MoodPanel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EconError {
    #[error("need more rows than parameters ({rows} rows, {params} parameters)")]
    InsufficientRows { rows: usize, params: usize },
    #[error("design column {column} ({name}) is collinear with earlier columns")]
    RankDeficient { column: usize, name: String },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value in regression data")]
    NonFinite,
    #[error("lag {lag} needs at least {needed} observations, have {available}")]
    InsufficientSample {
        lag: usize,
        available: usize,
        needed: usize,
    },
    #[error("reduced design is not nested in the full design: {0}")]
    NotNested(String),
    #[error("response {0} is constant")]
    DegenerateResponse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Minimum panel rows for the mood regression.
pub const MIN_REGRESSION_ROWS: usize = 10;

/// Regresses the OF column on the six mood dimensions.
pub fn regress_of_on_gpoms(panel: &MoodPanel) -> Result<OlsFit, EconError> {
    if panel.len() < MIN_REGRESSION_ROWS {
        return Err(EconError::InsufficientRows {
            rows: panel.len(),
            params: 7,
        });
    }
    let y = panel.column(Column::Of);
    if y.iter().all(|&v| v == y[0]) {
        return Err(EconError::DegenerateResponse("OF".into()));
    }
    let cols: Vec<Vec<f64>> = Dimension::ALL
        .iter()
        .map(|d| panel.column(Column::Mood(*d)).to_vec())
        .collect();
    let names: Vec<String> = Dimension::ALL
        .iter()
        .enumerate()
        .map(|(i, d)| format!("{} (X{})", d.name(), i + 1))
        .collect();
    ols(y, &Matrix::from_columns(&cols), Some(&names))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedF {
    pub f_stat: f64,
    pub p_value: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub rss_full: f64,
    pub rss_reduced: f64,
}

/// F-test of a full design against a reduced design whose columns are a
/// subset of the full one's. Both models get an intercept.
pub fn nested_f_test(y: &[f64], x_full: &Matrix, x_reduced: &Matrix) -> Result<NestedF, EconError> {
    if x_reduced.rows() != x_full.rows() {
        return Err(EconError::LengthMismatch {
            expected: x_full.rows(),
            found: x_reduced.rows(),
        });
    }
    let full_cols: Vec<Vec<f64>> = (0..x_full.cols()).map(|j| x_full.column(j)).collect();
    let mut used = vec![false; full_cols.len()];
    for j in 0..x_reduced.cols() {
        let c = x_reduced.column(j);
        let Some(pos) = full_cols
            .iter()
            .enumerate()
            .position(|(i, f)| !used[i] && *f == c)
        else {
            return Err(EconError::NotNested(format!(
                "reduced column {j} not found in full design"
            )));
        };
        used[pos] = true;
    }
    let full = ols(y, x_full, None)?;
    let df_num = x_full.cols() - x_reduced.cols();
    let df_den = full.df_resid();
    let reduced = if x_reduced.cols() == 0 {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum()
    } else {
        ols(y, x_reduced, None)?.rss
    };
    let rss_full = full.rss.min(reduced);
    let (f_stat, p_value) = if df_num == 0 {
        (0.0, 1.0)
    } else if rss_full > 0.0 {
        let f = ((reduced - rss_full) / df_num as f64) / (rss_full / df_den as f64);
        (f, special::f_sf(f, df_num as f64, df_den as f64))
    } else {
        (f64::INFINITY, 0.0)
    };
    Ok(NestedF {
        f_stat,
        p_value,
        df_num,
        df_den,
        rss_full,
        rss_reduced: reduced,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinomialSignificance {
    /// Probability of exactly `successes` hits.
    pub exact_prob: f64,
    /// Chance that at least one of `n_periods` independent windows shows it.
    pub window_adjusted_prob: f64,
}

fn ln_choose(n: u64, k: u64) -> f64 {
    use special::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    if n <= 60 {
        // exact in u128 up to this size
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        c as f64
    } else {
        ln_choose(n, k).exp()
    }
}

pub fn binomial_significance(
    successes: u64,
    trials: u64,
    p: f64,
    n_periods: f64,
) -> Result<BinomialSignificance, EconError> {
    if successes > trials {
        return Err(EconError::InvalidArgument(format!(
            "successes {successes} > trials {trials}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(EconError::InvalidArgument(format!(
            "success probability {p} outside (0, 1)"
        )));
    }
    if !(n_periods > 0.0 && n_periods.is_finite()) {
        return Err(EconError::InvalidArgument(format!(
            "n_periods {n_periods} must be positive"
        )));
    }
    let exact_prob = if trials <= 60 {
        choose(trials, successes)
            * p.powi(successes as i32)
            * (1.0 - p).powi((trials - successes) as i32)
    } else {
        (ln_choose(trials, successes)
            + successes as f64 * p.ln()
            + (trials - successes) as f64 * (1.0 - p).ln())
        .exp()
    };
    let window_adjusted_prob = 1.0 - (1.0 - exact_prob).powf(n_periods);
    Ok(BinomialSignificance {
        exact_prob,
        window_adjusted_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_examples() {
        let b = binomial_significance(13, 15, 0.5, 1.0).unwrap();
        assert_eq!(b.exact_prob, 105.0 / 32768.0);
        assert!((b.exact_prob - b.window_adjusted_prob).abs() < 1e-16);
        let w = binomial_significance(13, 15, 0.5, 10.9).unwrap();
        assert!((w.window_adjusted_prob - 0.0343).abs() < 5e-4);
        assert_eq!(
            binomial_significance(0, 0, 0.5, 1.0).unwrap().exact_prob,
            1.0
        );
    }

    #[test]
    fn binomial_preconditions() {
        assert!(binomial_significance(3, 2, 0.5, 1.0).is_err());
        assert!(binomial_significance(1, 2, 0.0, 1.0).is_err());
        assert!(binomial_significance(1, 2, 1.0, 1.0).is_err());
        assert!(binomial_significance(1, 2, 0.5, 0.0).is_err());
    }

    #[test]
    fn binomial_large_trials_sum_to_one() {
        let total: f64 = (0..=200)
            .map(|k| binomial_significance(k, 200, 0.3, 1.0).unwrap().exact_prob)
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nested_identical_designs() {
        let x = Matrix::from_columns(&[(0..20).map(|i| (i as f64).sin()).collect()]);
        let y: Vec<f64> = (0..20).map(|i| (i as f64 * 0.3).cos()).collect();
        let r = nested_f_test(&y, &x, &x).unwrap();
        assert_eq!((r.f_stat, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn non_nested_rejected() {
        let a: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let err = nested_f_test(&y, &Matrix::from_columns(&[a]), &Matrix::from_columns(&[b]))
            .unwrap_err();
        assert!(matches!(err, EconError::NotNested(_)));
    }

    #[test]
    fn constant_of_column_is_degenerate() {
        let n = 12;
        let panel = MoodPanel {
            dates: (0..n)
                .map(|i| chrono::NaiveDate::from_ymd_opt(2008, 3, 1 + i as u32).unwrap())
                .collect(),
            close: vec![1.0; n],
            delta: vec![0.0; n],
            of: vec![2.0; n],
            gpoms: std::array::from_fn(|k| (0..n).map(|i| ((i * (k + 2)) as f64).sin()).collect()),
        };
        assert!(matches!(
            regress_of_on_gpoms(&panel),
            Err(EconError::DegenerateResponse(_))
        ));
        assert!(matches!(
            regress_of_on_gpoms(&panel.slice(0, 5)),
            Err(EconError::InsufficientRows { .. })
        ));
    }
}
