//! Lagged input sets, train/test experiments and forecast metrics.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::econometrics::{binomial_significance, BinomialSignificance};
use crate::error::ErrorKind;
use crate::lexicons::Dimension;
use crate::sofnn::{self, SofnnError, SofnnParams, TrainOptions};
use crate::timeseries::{Column, MoodPanel, TimeSeriesError, UnitRange};

pub const DEFAULT_LAGS: usize = 3;
/// Test rows used when no split date is given.
pub const DEFAULT_TEST_ROWS: usize = 15;

#[derive(Debug, Error)]
pub enum ForecastError {
    #[error("{split} split is empty")]
    EmptySplit { split: &'static str },
    #[error("panel has {rows} rows, need more than {lags} for the lags")]
    TooFewRows { rows: usize, lags: usize },
    #[error("split date {0} is outside the panel")]
    SplitOutOfRange(NaiveDate),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("panel has no closing levels")]
    MissingLevels,
    #[error("actual value at index {0} is zero")]
    ZeroActual(usize),
    #[error("unknown input set {0:?}")]
    UnknownSpec(String),
    #[error("column {column}: {source}")]
    Scaling {
        column: String,
        #[source]
        source: TimeSeriesError,
    },
    #[error("{spec}: {source}")]
    Model {
        spec: String,
        #[source]
        source: SofnnError,
    },
}

impl ForecastError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ForecastError::Scaling { source, .. } => source.kind(),
            ForecastError::Model { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }
}

/// A named combination of lagged inputs. The index level is always included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSpec {
    pub name: String,
    pub columns: Vec<Column>,
    pub n_lags: usize,
}

impl InputSpec {
    fn with(name: &str, columns: Vec<Column>) -> Self {
        InputSpec {
            name: name.to_owned(),
            columns,
            n_lags: DEFAULT_LAGS,
        }
    }

    /// Index only.
    pub fn baseline() -> Self {
        Self::with("I0", Vec::new())
    }

    /// Index plus Calm.
    pub fn calm() -> Self {
        Self::with("I1", vec![Column::Mood(Dimension::Calm)])
    }

    /// Index plus Calm plus the given other dimension.
    pub fn calm_with(d: Dimension) -> Self {
        assert!(
            d != Dimension::Calm,
            "second dimension must differ from Calm"
        );
        Self::with(
            &format!("I1_{}", d.index() + 1),
            vec![Column::Mood(Dimension::Calm), Column::Mood(d)],
        )
    }

    /// Index plus the sentiment ratio.
    pub fn opinion() -> Self {
        Self::with("IOF", vec![Column::Of])
    }

    /// All eight sets in report order.
    pub fn all() -> Vec<InputSpec> {
        let mut v = vec![Self::opinion(), Self::baseline(), Self::calm()];
        v.extend(Dimension::ALL[1..].iter().map(|&d| Self::calm_with(d)));
        v
    }

    /// Table heading: `I_OF`, `I_0`, `I_1`, `I_1,k`.
    pub fn label(&self) -> String {
        match self.name.strip_prefix('I') {
            Some("OF") => "I_OF".into(),
            Some(rest) => format!("I_{}", rest.replace('_', ",")),
            None => self.name.clone(),
        }
    }

    pub fn features(&self) -> usize {
        self.n_lags * (1 + self.columns.len())
    }
}

impl FromStr for InputSpec {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '_' | ','))
            .collect::<String>()
            .to_uppercase();
        InputSpec::all()
            .into_iter()
            .find(|spec| spec.name.replace('_', "") == norm)
            .ok_or_else(|| ForecastError::UnknownSpec(s.to_owned()))
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub type Sample = (Vec<f64>, f64);

/// Bookkeeping for one test target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestPoint {
    pub date: NaiveDate,
    pub actual: f64,
    pub previous: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub test_points: Vec<TestPoint>,
    /// Shared by index features and the target.
    pub index_range: UnitRange,
    /// One per extra column, in input-set order.
    pub column_ranges: Vec<UnitRange>,
    /// Test feature values clipped into `[0, 1]`.
    pub clipped: usize,
}

/// First panel row of the test split: the first date on or after `split`,
/// or the last [`DEFAULT_TEST_ROWS`] rows.
pub fn split_row(panel: &MoodPanel, split: Option<NaiveDate>) -> Result<usize, ForecastError> {
    match split {
        Some(date) => {
            let row = panel.dates.partition_point(|d| *d < date);
            if row == 0 || row >= panel.len() {
                return Err(ForecastError::SplitOutOfRange(date));
            }
            Ok(row)
        }
        None => Ok(panel.len().saturating_sub(DEFAULT_TEST_ROWS)),
    }
}

fn fit_range(name: &str, values: &[f64]) -> Result<UnitRange, ForecastError> {
    UnitRange::fit(values).map_err(|source| ForecastError::Scaling {
        column: name.to_owned(),
        source,
    })
}

/// Builds lagged samples: the target at row `t` is the closing level, the
/// features are `[t-n, .., t-1]` of the index level followed by the same
/// lags of each extra column. Ranges are fitted on rows before `split`.
pub fn build_dataset(
    panel: &MoodPanel,
    spec: &InputSpec,
    split: usize,
) -> Result<Dataset, ForecastError> {
    let n = spec.n_lags;
    if panel.close.len() != panel.len() {
        return Err(ForecastError::MissingLevels);
    }
    if panel.len() <= n {
        return Err(ForecastError::TooFewRows {
            rows: panel.len(),
            lags: n,
        });
    }
    if split <= n {
        return Err(ForecastError::EmptySplit { split: "train" });
    }
    if split >= panel.len() {
        return Err(ForecastError::EmptySplit { split: "test" });
    }
    let index_range = fit_range("DJIA", &panel.close[..split])?;
    let column_ranges: Vec<UnitRange> = spec
        .columns
        .iter()
        .map(|&c| fit_range(c.name(), &panel.column(c)[..split]))
        .collect::<Result<_, _>>()?;

    let mut clipped = 0;
    let mut sample = |t: usize, count_clips: bool| -> Vec<f64> {
        let mut x = Vec::with_capacity(spec.features());
        let series = std::iter::once((&panel.close[..], index_range)).chain(
            spec.columns
                .iter()
                .zip(&column_ranges)
                .map(|(&c, &r)| (panel.column(c), r)),
        );
        for (values, range) in series {
            for lag in (1..=n).rev() {
                let v = range.scale(values[t - lag]);
                if !(0.0..=1.0).contains(&v) {
                    if count_clips {
                        clipped += 1;
                    }
                    x.push(v.clamp(0.0, 1.0));
                } else {
                    x.push(v);
                }
            }
        }
        x
    };
    let train: Vec<Sample> = (n..split)
        .map(|t| (sample(t, false), index_range.scale(panel.close[t])))
        .collect();
    let test: Vec<Sample> = (split..panel.len())
        .map(|t| (sample(t, true), index_range.scale(panel.close[t])))
        .collect();
    let test_points = (split..panel.len())
        .map(|t| TestPoint {
            date: panel.dates[t],
            actual: panel.close[t],
            previous: panel.close[t - 1],
        })
        .collect();
    Ok(Dataset {
        train,
        test,
        test_points,
        index_range,
        column_ranges,
        clipped,
    })
}

/// Mean absolute percentage error, in percent.
pub fn mape(predicted: &[f64], actual: &[f64]) -> Result<f64, ForecastError> {
    if predicted.len() != actual.len() {
        return Err(ForecastError::LengthMismatch(predicted.len(), actual.len()));
    }
    if actual.is_empty() {
        return Err(ForecastError::Empty);
    }
    let mut sum = 0.0;
    for (i, (p, a)) in predicted.iter().zip(actual).enumerate() {
        if *a == 0.0 {
            return Err(ForecastError::ZeroActual(i));
        }
        sum += ((p - a) / a).abs();
    }
    Ok(100.0 * sum / actual.len() as f64)
}

fn goes_up(from: f64, to: f64) -> bool {
    to - from >= 0.0
}

/// Direction hits against the previous actual close. A zero move counts
/// as up on either side.
pub fn direction_hits(
    predicted: &[f64],
    actual: &[f64],
    previous: &[f64],
) -> Result<usize, ForecastError> {
    if predicted.len() != actual.len() {
        return Err(ForecastError::LengthMismatch(predicted.len(), actual.len()));
    }
    if previous.len() != actual.len() {
        return Err(ForecastError::LengthMismatch(previous.len(), actual.len()));
    }
    if actual.is_empty() {
        return Err(ForecastError::Empty);
    }
    Ok((0..actual.len())
        .filter(|&i| goes_up(previous[i], predicted[i]) == goes_up(previous[i], actual[i]))
        .count())
}

/// Direction accuracy in percent.
pub fn direction_accuracy(
    predicted: &[f64],
    actual: &[f64],
    previous: &[f64],
) -> Result<f64, ForecastError> {
    let hits = direction_hits(predicted, actual, previous)?;
    Ok(100.0 * hits as f64 / actual.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub date: NaiveDate,
    pub predicted: f64,
    pub actual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec: String,
    pub label: String,
    pub mape_pct: f64,
    pub direction_pct: f64,
    pub direction_hits: usize,
    pub n_test: usize,
    pub n_train: usize,
    pub neurons: usize,
    pub train_rmse: f64,
    pub clipped_features: usize,
    pub predictions: Vec<Prediction>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub train: TrainOptions,
    /// Keep learning online from each test day once its close is known.
    pub rolling: bool,
}

/// Trains and scores one input set.
pub fn evaluate_spec(
    panel: &MoodPanel,
    spec: &InputSpec,
    params: &SofnnParams,
    split: usize,
    opts: ExperimentOptions,
) -> Result<EvalReport, ForecastError> {
    let data = build_dataset(panel, spec, split)?;
    let model_err = |source| ForecastError::Model {
        spec: spec.name.clone(),
        source,
    };
    // a single threshold applies to every input
    let k_d = match params.k_d.len() {
        n if n == spec.features() => params.k_d.clone(),
        1 => vec![params.k_d[0]; spec.features()],
        n => {
            return Err(model_err(SofnnError::InvalidParams(format!(
                "k_d has {n} entries for {} inputs",
                spec.features()
            ))))
        }
    };
    let params = SofnnParams {
        k_d,
        ..params.clone()
    };
    let (mut model, log) = sofnn::train(&data.train, &params, opts.train).map_err(model_err)?;
    let mut predicted = Vec::with_capacity(data.test.len());
    for (x, y) in &data.test {
        predicted.push(
            data.index_range
                .unscale(model.predict(x).map_err(model_err)?),
        );
        if opts.rolling {
            model.observe(x, *y).map_err(model_err)?;
        }
    }
    let actual: Vec<f64> = data.test_points.iter().map(|p| p.actual).collect();
    let previous: Vec<f64> = data.test_points.iter().map(|p| p.previous).collect();
    let hits = direction_hits(&predicted, &actual, &previous)?;
    Ok(EvalReport {
        spec: spec.name.clone(),
        label: spec.label(),
        mape_pct: mape(&predicted, &actual)?,
        direction_pct: 100.0 * hits as f64 / actual.len() as f64,
        direction_hits: hits,
        n_test: actual.len(),
        n_train: data.train.len(),
        neurons: model.neuron_count(),
        train_rmse: log.final_rmse,
        clipped_features: data.clipped,
        predictions: data
            .test_points
            .iter()
            .zip(&predicted)
            .map(|(p, &v)| Prediction {
                date: p.date,
                predicted: v,
                actual: p.actual,
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub split_date: NaiveDate,
    pub params: SofnnParams,
    pub reports: Vec<EvalReport>,
    /// Odds of the best direction accuracy under coin flipping.
    pub significance: Option<Significance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub spec: String,
    pub hits: usize,
    pub trials: usize,
    pub n_periods: f64,
    #[serde(flatten)]
    pub odds: BinomialSignificance,
}

/// Runs every spec with identical parameters. Specs are independent and
/// run in parallel; each keeps its own sequential training order.
/// `n_periods` defaults to panel rows over test rows.
pub fn run_experiment(
    panel: &MoodPanel,
    specs: &[InputSpec],
    params: &SofnnParams,
    split_date: Option<NaiveDate>,
    n_periods: Option<f64>,
    opts: ExperimentOptions,
) -> Result<Experiment, ForecastError> {
    let split = split_row(panel, split_date)?;
    let reports: Vec<EvalReport> = specs
        .par_iter()
        .map(|s| evaluate_spec(panel, s, params, split, opts))
        .collect::<Result<_, _>>()?;
    let significance = reports
        .iter()
        .max_by(|a, b| {
            a.direction_hits
                .cmp(&b.direction_hits)
                .then_with(|| b.mape_pct.total_cmp(&a.mape_pct))
        })
        .and_then(|best| {
            let n_periods = n_periods.unwrap_or(panel.len() as f64 / best.n_test as f64);
            binomial_significance(
                best.direction_hits as u64,
                best.n_test as u64,
                0.5,
                n_periods,
            )
            .ok()
            .map(|odds| Significance {
                spec: best.spec.clone(),
                hits: best.direction_hits,
                trials: best.n_test,
                n_periods,
                odds,
            })
        });
    Ok(Experiment {
        split_date: panel.dates[split],
        params: params.clone(),
        reports,
        significance,
    })
}

/// Plain-text table: one column per spec, MAPE and direction rows, best
/// value per row starred.
pub fn render_table(reports: &[EvalReport]) -> String {
    const FIRST: usize = 15;
    const CELL: usize = 9;
    let mut out = String::new();
    let mut header = format!("{:<FIRST$}", "Evaluation");
    for r in reports {
        header.push_str(&format!("{:<CELL$}", r.label));
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    let best_mape = reports
        .iter()
        .map(|r| r.mape_pct)
        .fold(f64::INFINITY, f64::min);
    let best_dir = reports
        .iter()
        .map(|r| r.direction_pct)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut row = |title: &str, cells: Vec<String>| {
        let mut line = format!("{title:<FIRST$}");
        for c in cells {
            line.push_str(&format!("{c:<CELL$}"));
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    };
    // compare at display precision so printed ties star together
    let star = |shown: &str, best: &str| if shown == best { "*" } else { "" };
    let best_m = format!("{best_mape:.2}");
    row(
        "MAPE (%)",
        reports
            .iter()
            .map(|r| {
                let s = format!("{:.2}", r.mape_pct);
                format!("{s}{}", star(&s, &best_m))
            })
            .collect(),
    );
    let best_d = format!("{best_dir:.1}");
    row(
        "Direction (%)",
        reports
            .iter()
            .map(|r| {
                let s = format!("{:.1}", r.direction_pct);
                format!("{s}{}", star(&s, &best_d))
            })
            .collect(),
    );
    out
}

/// Table plus the binomial odds of the best direction accuracy.
pub fn render_experiment(exp: &Experiment) -> String {
    let mut out = render_table(&exp.reports);
    if let Some(s) = &exp.significance {
        writeln!(
            out,
            "\n{}: {}/{} directions correct; P(exactly {} | p = 0.5) = {:.4}; over {:.1} periods = {:.4}",
            s.spec, s.hits, s.trials, s.hits, s.odds.exact_prob, s.n_periods, s.odds.window_adjusted_prob
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(n: usize) -> MoodPanel {
        let start = NaiveDate::from_ymd_opt(2008, 3, 3).unwrap();
        MoodPanel {
            dates: (0..n)
                .map(|i| start + chrono::Days::new(i as u64))
                .collect(),
            close: (0..n)
                .map(|i| 100.0 + (i as f64 * 0.9).sin() * 5.0 + i as f64)
                .collect(),
            delta: vec![0.0; n],
            of: (0..n).map(|i| 1.0 + (i as f64 * 1.7).cos()).collect(),
            gpoms: std::array::from_fn(|k| {
                (0..n)
                    .map(|i| ((i * (k + 3)) as f64 * 0.37).sin())
                    .collect()
            }),
        }
    }

    #[test]
    fn spec_names_and_labels() {
        let all = InputSpec::all();
        let labels: Vec<String> = all.iter().map(InputSpec::label).collect();
        assert_eq!(
            labels,
            ["I_OF", "I_0", "I_1", "I_1,2", "I_1,3", "I_1,4", "I_1,5", "I_1,6"]
        );
        assert_eq!("i1_6".parse::<InputSpec>().unwrap().columns.len(), 2);
        assert_eq!("I1,3".parse::<InputSpec>().unwrap().name, "I1_3");
        assert!("I9".parse::<InputSpec>().is_err());
    }

    #[test]
    fn dataset_shapes() {
        let p = panel(10);
        let d = build_dataset(&p, &InputSpec::baseline(), 8).unwrap();
        assert_eq!(d.train.len() + d.test.len(), 7);
        assert!(d.train.iter().chain(&d.test).all(|(x, _)| x.len() == 3));
        let d1 = build_dataset(&p, &InputSpec::calm(), 8).unwrap();
        assert_eq!(d1.train[0].0.len(), 6);
        assert!(matches!(
            build_dataset(&p, &InputSpec::baseline(), 10),
            Err(ForecastError::EmptySplit { .. })
        ));
        assert!(matches!(
            build_dataset(&p, &InputSpec::baseline(), 3),
            Err(ForecastError::EmptySplit { .. })
        ));
    }

    #[test]
    fn mape_examples() {
        assert_eq!(mape(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((mape(&[110.0], &[100.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(
            mape(&[1.0], &[0.0]),
            Err(ForecastError::ZeroActual(0))
        ));
    }

    #[test]
    fn direction_tie_rule() {
        // flat prediction counts as up; actual rose
        assert_eq!(
            direction_accuracy(&[10.0], &[11.0], &[10.0]).unwrap(),
            100.0
        );
        // flat prediction vs falling actual
        assert_eq!(direction_accuracy(&[10.0], &[9.0], &[10.0]).unwrap(), 0.0);
        assert_eq!(
            direction_accuracy(&[12.0, 8.0], &[11.0, 9.0], &[10.0, 10.0]).unwrap(),
            100.0
        );
    }

    #[test]
    fn single_spec_table() {
        let p = panel(40);
        let exp = run_experiment(
            &p,
            &[InputSpec::baseline()],
            &SofnnParams::standard(3),
            None,
            None,
            ExperimentOptions::default(),
        )
        .unwrap();
        assert_eq!(exp.reports.len(), 1);
        let table = render_table(&exp.reports);
        assert_eq!(table.lines().count(), 3);
        assert!(table.starts_with("Evaluation     I_0"));
    }
}
