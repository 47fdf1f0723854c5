use serde::{Deserialize, Serialize};

use super::ols::ols;
use super::special::f_sf;
use super::EconError;
use crate::linalg::Matrix;

/// One lag of a bivariate Granger test of whether `x` helps predict `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrangerRow {
    pub lag: usize,
    pub series_name: String,
    pub f_stat: f64,
    pub p_value: f64,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub n_obs: usize,
}

/// Columns `target[t - 1], ..., target[t - lag]` for rows `t = lag..T`.
fn lag_columns(series: &[f64], lag: usize) -> Vec<Vec<f64>> {
    (1..=lag)
        .map(|i| (lag..series.len()).map(|t| series[t - i]).collect())
        .collect()
}

/// Restricted model: intercept plus `lag` own lags of `d`. Unrestricted model
/// adds `lag` lags of `x`. Both are fitted on the same `T - lag` rows.
pub fn granger_lag(
    d: &[f64],
    x: &[f64],
    series_name: &str,
    lag: usize,
) -> Result<GrangerRow, EconError> {
    if d.len() != x.len() {
        return Err(EconError::LengthMismatch {
            expected: d.len(),
            found: x.len(),
        });
    }
    let t = d.len();
    // need T - n > 2n + 2
    if lag == 0 || t <= 3 * lag + 2 {
        return Err(EconError::InsufficientSample {
            lag,
            available: t,
            needed: 3 * lag + 3,
        });
    }
    let y = &d[lag..];
    let own = lag_columns(d, lag);
    let mut both = own.clone();
    both.extend(lag_columns(x, lag));
    let restricted = ols(y, &Matrix::from_columns(&own), None)?;
    let unrestricted = ols(y, &Matrix::from_columns(&both), None)?;

    let df_num = lag;
    let df_den = t - 3 * lag - 1;
    let rss_r = restricted.rss;
    let rss_u = unrestricted.rss.min(rss_r);
    let (f_stat, p_value) = if rss_u > 0.0 {
        let f = ((rss_r - rss_u) / df_num as f64) / (rss_u / df_den as f64);
        (f, f_sf(f, df_num as f64, df_den as f64))
    } else if rss_r > 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        (0.0, 1.0)
    };
    Ok(GrangerRow {
        lag,
        series_name: series_name.to_owned(),
        f_stat,
        p_value,
        rss_restricted: rss_r,
        rss_unrestricted: rss_u,
        df_num,
        df_den,
        n_obs: t - lag,
    })
}

/// Runs [`granger_lag`] for each requested lag; failures stay per-lag.
pub fn granger_bivariate(
    d: &[f64],
    x: &[f64],
    series_name: &str,
    lags: &[usize],
) -> Vec<Result<GrangerRow, EconError>> {
    lags.iter()
        .map(|&lag| granger_lag(d, x, series_name, lag))
        .collect()
}
