//! Dated series, local z-scores, index deltas, panel alignment and unit scaling.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ErrorKind;
use crate::lexicons::Dimension;
use crate::scoring::DailyMood;

/// Window standard deviations below this are treated as zero.
pub const ZERO_STD: f64 = 1e-12;

pub const PANEL_CSV_HEADER: &str = "date,D,OF,Calm,Alert,Sure,Vital,Kind,Happy";

#[derive(Debug, Error)]
pub enum TimeSeriesError {
    #[error("series needs at least {needed} points, has {found}")]
    TooShort { needed: usize, found: usize },
    #[error("dates must be strictly increasing ({prev} then {next})")]
    Unordered { prev: NaiveDate, next: NaiveDate },
    #[error("non-finite value on {0}")]
    NonFinite(NaiveDate),
    #[error("window half-width must be at least 1")]
    BadWindow,
    #[error("mood and price dates do not overlap")]
    EmptyIntersection,
    #[error("cannot fit a scaling range to constant values ({0})")]
    DegenerateRange(f64),
    #[error("invalid scaling range [{min}, {max}]")]
    BadRange { min: f64, max: f64 },
    #[error("price file line {line}: {reason}")]
    PriceFormat { line: usize, reason: String },
    #[error("panel is missing column {0}")]
    MissingColumn(String),
    #[error("panel file line {line}: {reason}")]
    PanelFormat { line: usize, reason: String },
}

impl TimeSeriesError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            TimeSeriesError::DegenerateRange(_) | TimeSeriesError::BadWindow => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    points: Vec<(NaiveDate, f64)>,
}

impl TimeSeries {
    pub fn new(points: Vec<(NaiveDate, f64)>) -> Result<Self, TimeSeriesError> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(TimeSeriesError::Unordered {
                    prev: w[0].0,
                    next: w[1].0,
                });
            }
        }
        if let Some((d, _)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(TimeSeriesError::NonFinite(*d));
        }
        Ok(TimeSeries { points })
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by_key(&date, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }
}

/// Which indices make up the window around point `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    /// `[t-k, t+k]`, truncated at the series ends.
    #[default]
    Centered,
    /// `[t-2k, t]`, using past values only.
    Trailing,
}

impl Window {
    pub fn bounds(self, t: usize, k: usize, len: usize) -> (usize, usize) {
        match self {
            Window::Centered => (t.saturating_sub(k), (t + k).min(len - 1)),
            Window::Trailing => (t.saturating_sub(2 * k), t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZScored {
    pub series: TimeSeries,
    /// Indices whose window had (near) zero spread; their value is 0.
    pub flagged: Vec<usize>,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Standardizes every point by the mean and sample standard deviation of its
/// local window.
pub fn zscore_local(s: &TimeSeries, k: usize, window: Window) -> Result<ZScored, TimeSeriesError> {
    if k == 0 {
        return Err(TimeSeriesError::BadWindow);
    }
    if s.len() < 2 {
        return Err(TimeSeriesError::TooShort {
            needed: 2,
            found: s.len(),
        });
    }
    let vals = s.values();
    let mut flagged = Vec::new();
    let points = s
        .points
        .iter()
        .enumerate()
        .map(|(t, &(date, x))| {
            let (lo, hi) = window.bounds(t, k, vals.len());
            let (mean, sd) = mean_std(&vals[lo..=hi]);
            let z = if sd < ZERO_STD {
                flagged.push(t);
                0.0
            } else {
                (x - mean) / sd
            };
            (date, z)
        })
        .collect();
    Ok(ZScored {
        series: TimeSeries { points },
        flagged,
    })
}

/// Day-over-day differences, dated at the later day.
pub fn index_delta(closes: &TimeSeries) -> Result<TimeSeries, TimeSeriesError> {
    if closes.len() < 2 {
        return Err(TimeSeriesError::TooShort {
            needed: 2,
            found: closes.len(),
        });
    }
    Ok(TimeSeries {
        points: closes
            .points
            .windows(2)
            .map(|w| (w[1].0, w[1].1 - w[0].1))
            .collect(),
    })
}

/// Panel columns other than the date.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Column {
    Delta,
    Of,
    Mood(Dimension),
}

impl Column {
    pub const MOODS: [Column; 7] = [
        Column::Of,
        Column::Mood(Dimension::Calm),
        Column::Mood(Dimension::Alert),
        Column::Mood(Dimension::Sure),
        Column::Mood(Dimension::Vital),
        Column::Mood(Dimension::Kind),
        Column::Mood(Dimension::Happy),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::Delta => "D",
            Column::Of => "OF",
            Column::Mood(d) => d.name(),
        }
    }
}

impl std::str::FromStr for Column {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "D" | "d" => Ok(Column::Delta),
            x if x.eq_ignore_ascii_case("of") => Ok(Column::Of),
            x => x.parse::<Dimension>().map(Column::Mood),
        }
    }
}

/// Date-aligned trading-day rows: closing level, index delta and the seven
/// mood values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MoodPanel {
    pub dates: Vec<NaiveDate>,
    pub close: Vec<f64>,
    pub delta: Vec<f64>,
    pub of: Vec<f64>,
    pub gpoms: [Vec<f64>; 6],
}

impl MoodPanel {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column(&self, c: Column) -> &[f64] {
        match c {
            Column::Delta => &self.delta,
            Column::Of => &self.of,
            Column::Mood(d) => &self.gpoms[d.index()],
        }
    }

    /// Rows `[start, end)` as a new panel.
    pub fn slice(&self, start: usize, end: usize) -> MoodPanel {
        MoodPanel {
            dates: self.dates[start..end].to_vec(),
            close: self
                .close
                .get(start..end)
                .map(<[f64]>::to_vec)
                .unwrap_or_default(),
            delta: self.delta[start..end].to_vec(),
            of: self.of[start..end].to_vec(),
            gpoms: std::array::from_fn(|i| self.gpoms[i][start..end].to_vec()),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{PANEL_CSV_HEADER}")?;
        for i in 0..self.len() {
            write!(w, "{},{},{}", self.dates[i], self.delta[i], self.of[i])?;
            for g in &self.gpoms {
                write!(w, ",{}", g[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Reads a panel written by [`MoodPanel::write_csv`]. The file carries no
/// closing levels, so `close` comes back empty.
pub fn read_panel_csv<R: Read>(reader: R) -> Result<MoodPanel, TimeSeriesError> {
    let bad = |line: usize, reason: String| TimeSeriesError::PanelFormat { line, reason };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| bad(1, e.to_string()))?;
    let expected: Vec<&str> = PANEL_CSV_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(bad(1, format!("expected header {PANEL_CSV_HEADER:?}")));
    }
    let mut panel = MoodPanel::default();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let date: NaiveDate = rec[0]
            .parse()
            .map_err(|_| bad(line, format!("bad date {:?}", &rec[0])))?;
        if panel.dates.last().is_some_and(|&d| d >= date) {
            return Err(bad(line, format!("date {date} out of order")));
        }
        let mut vals = [0.0; 8];
        for (slot, field) in vals.iter_mut().zip(rec.iter().skip(1)) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(line, format!("bad number {field:?}")))?;
        }
        panel.dates.push(date);
        panel.delta.push(vals[0]);
        panel.of.push(vals[1]);
        for (col, v) in panel.gpoms.iter_mut().zip(&vals[2..]) {
            col.push(*v);
        }
    }
    Ok(panel)
}

/// Keeps trading days that have a complete mood row, dropping the first
/// close since its delta is undefined. Lags downstream count panel rows.
pub fn align_panel(mood: &[DailyMood], closes: &TimeSeries) -> Result<MoodPanel, TimeSeriesError> {
    if mood.is_empty() || closes.is_empty() {
        return Err(TimeSeriesError::EmptyIntersection);
    }
    let deltas = index_delta(closes)?;
    let by_date: BTreeMap<NaiveDate, &DailyMood> = mood.iter().map(|m| (m.date, m)).collect();
    let mut panel = MoodPanel::default();
    for (i, &(date, d)) in deltas.points.iter().enumerate() {
        let Some(m) = by_date.get(&date) else {
            continue;
        };
        let Some(of) = m.of_ratio else { continue };
        panel.dates.push(date);
        panel.close.push(closes.points[i + 1].1);
        panel.delta.push(d);
        panel.of.push(of);
        for (col, v) in panel.gpoms.iter_mut().zip(m.gpoms) {
            col.push(v);
        }
    }
    if panel.is_empty() {
        return Err(TimeSeriesError::EmptyIntersection);
    }
    Ok(panel)
}

/// Z-scores each of the seven mood series over the mood calendar. Days
/// lacking a ratio are left out of that series and stay missing.
pub fn zscore_moods(
    mood: &[DailyMood],
    k: usize,
    window: Window,
) -> Result<Vec<DailyMood>, TimeSeriesError> {
    let mut out: Vec<DailyMood> = mood.to_vec();
    let of_points: Vec<(NaiveDate, f64)> = mood
        .iter()
        .filter_map(|m| m.of_ratio.map(|v| (m.date, v)))
        .collect();
    let of_series = TimeSeries::new(of_points)?;
    let of_z = zscore_local(&of_series, k, window)?.series;
    for m in &mut out {
        m.of_ratio = m.of_ratio.and(of_z.get(m.date));
    }
    for d in Dimension::ALL {
        let s = TimeSeries::new(mood.iter().map(|m| (m.date, m.gpoms[d.index()])).collect())?;
        let z = zscore_local(&s, k, window)?.series;
        for (m, &(_, v)) in out.iter_mut().zip(z.points()) {
            m.gpoms[d.index()] = v;
        }
    }
    Ok(out)
}

/// A fitted linear map of `[min, max]` onto `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitRange {
    pub min: f64,
    pub max: f64,
}

impl UnitRange {
    pub fn new(min: f64, max: f64) -> Result<Self, TimeSeriesError> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(TimeSeriesError::BadRange { min, max });
        }
        Ok(UnitRange { min, max })
    }

    pub fn fit(values: &[f64]) -> Result<Self, TimeSeriesError> {
        if values.is_empty() {
            return Err(TimeSeriesError::TooShort {
                needed: 1,
                found: 0,
            });
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max <= min {
            return Err(TimeSeriesError::DegenerateRange(min));
        }
        UnitRange::new(min, max)
    }

    /// Unclipped forward map.
    pub fn scale(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn unscale(&self, y: f64) -> f64 {
        self.min + y * (self.max - self.min)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scaled {
    pub values: Vec<f64>,
    pub range: UnitRange,
    pub clipped: usize,
}

/// Maps values onto `[0, 1]`. Without `fit_range` the range is fitted to the
/// input; with one, values outside it are clipped and counted.
pub fn scale_unit(values: &[f64], fit_range: Option<UnitRange>) -> Result<Scaled, TimeSeriesError> {
    let range = match fit_range {
        Some(r) => UnitRange::new(r.min, r.max)?,
        None => UnitRange::fit(values)?,
    };
    let mut clipped = 0;
    let values = values
        .iter()
        .map(|&x| {
            let y = range.scale(x);
            if !(0.0..=1.0).contains(&y) {
                clipped += 1;
                y.clamp(0.0, 1.0)
            } else {
                y
            }
        })
        .collect();
    Ok(Scaled {
        values,
        range,
        clipped,
    })
}

/// Reads `Date` and `Close` from a Yahoo-style historical price CSV. Rows are
/// sorted by date; duplicate dates are rejected.
pub fn read_price_csv<R: Read>(reader: R) -> Result<TimeSeries, TimeSeriesError> {
    let bad = |line: usize, reason: String| TimeSeriesError::PriceFormat { line, reason };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(1, format!("missing {name:?} column")))
    };
    let date_col = find("Date")?;
    let close_col = find("Close")?;
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let date_s = rec
            .get(date_col)
            .ok_or_else(|| bad(line, "missing Date".into()))?;
        let close_s = rec
            .get(close_col)
            .ok_or_else(|| bad(line, "missing Close".into()))?;
        let date = NaiveDate::parse_from_str(date_s, "%Y-%m-%d")
            .map_err(|e| bad(line, format!("date {date_s:?}: {e}")))?;
        let close: f64 = close_s
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| bad(line, format!("close {close_s:?} is not a number")))?;
        points.push((date, close));
    }
    points.sort_by_key(|p| p.0);
    TimeSeries::new(points)
}

pub const PRICE_CSV_HEADER: &str = "Date,Open,High,Low,Close,Adj Close,Volume";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriceRow {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

pub fn write_price_csv<W: Write>(mut w: W, rows: &[PriceRow]) -> std::io::Result<()> {
    writeln!(w, "{PRICE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.2},{:.2},{:.2},{:.2},{:.2},{}",
            r.date, r.open, r.high, r.low, r.close, r.close, r.volume
        )?;
    }
    Ok(())
}
