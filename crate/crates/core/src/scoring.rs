//! Daily mood scores: the positive/negative occurrence ratio and the
//! six-dimension weighted sums.

use std::io::{BufRead, Write};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::DailyDocuments;
use crate::lexicons::{GpomsLexicon, OfLexicon};

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("no negative term occurrences on {0}")]
    NoNegativeEvidence(NaiveDate),
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("mood csv line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

pub const MOOD_CSV_HEADER: &str = "date,of_ratio,calm,alert,sure,vital,kind,happy";

/// Positive/negative term-occurrence counts for one day.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OfCounts {
    pub positive: usize,
    pub negative: usize,
}

pub fn count_of_terms(docs: &DailyDocuments, lex: &OfLexicon) -> OfCounts {
    let mut c = OfCounts::default();
    for tok in docs.tokens() {
        if lex.positive.contains(tok) {
            c.positive += 1;
        } else if lex.negative.contains(tok) {
            c.negative += 1;
        }
    }
    c
}

/// Ratio of positive to negative term occurrences over the day.
pub fn score_of_day(docs: &DailyDocuments, lex: &OfLexicon) -> Result<f64, ScoreError> {
    if lex.is_empty() {
        return Err(ScoreError::EmptyLexicon);
    }
    let c = count_of_terms(docs, lex);
    if c.negative == 0 {
        return Err(ScoreError::NoNegativeEvidence(docs.date));
    }
    Ok(c.positive as f64 / c.negative as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpomsDay {
    pub values: [f64; 6],
    /// Matched token occurrences.
    pub matches: usize,
}

impl GpomsDay {
    pub fn is_empty(&self) -> bool {
        self.matches == 0
    }
}

/// Every matched token occurrence adds `weight * polarity` to the dimension of
/// each base term it links to. With `volume_normalize` the sums are divided
/// by the day's match count.
pub fn score_gpoms_day(
    docs: &DailyDocuments,
    lex: &GpomsLexicon,
    volume_normalize: bool,
) -> GpomsDay {
    let mut values = [0.0; 6];
    let mut matches = 0usize;
    for tok in docs.tokens() {
        if let Some(links) = lex.links(tok) {
            matches += 1;
            for l in links {
                values[l.dimension.index()] += l.weight * l.polarity.sign();
            }
        }
    }
    if volume_normalize && matches > 0 {
        for v in &mut values {
            *v /= matches as f64;
        }
    }
    GpomsDay { values, matches }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DailyMood {
    pub date: NaiveDate,
    /// `None` when the day had no negative evidence.
    pub of_ratio: Option<f64>,
    pub gpoms: [f64; 6],
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub days: usize,
    pub missing_of: Vec<NaiveDate>,
    pub no_gpoms_matches: Vec<NaiveDate>,
}

#[derive(Clone, Copy, Debug)]
pub struct ScoreOptions {
    pub volume_normalize: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            volume_normalize: true,
        }
    }
}

/// Scores every day independently; results keep the input order.
pub fn score_days(
    days: &[DailyDocuments],
    of: &OfLexicon,
    gpoms: &GpomsLexicon,
    opts: ScoreOptions,
) -> Result<(Vec<DailyMood>, ScoreReport), ScoreError> {
    if of.is_empty() || gpoms.is_empty() {
        return Err(ScoreError::EmptyLexicon);
    }
    let scored: Vec<(DailyMood, bool)> = days
        .par_iter()
        .map(|d| {
            let g = score_gpoms_day(d, gpoms, opts.volume_normalize);
            let mood = DailyMood {
                date: d.date,
                of_ratio: score_of_day(d, of).ok(),
                gpoms: g.values,
            };
            (mood, g.is_empty())
        })
        .collect();
    let mut report = ScoreReport {
        days: scored.len(),
        ..Default::default()
    };
    let mut out = Vec::with_capacity(scored.len());
    for (m, empty) in scored {
        if m.of_ratio.is_none() {
            report.missing_of.push(m.date);
        }
        if empty {
            report.no_gpoms_matches.push(m.date);
        }
        out.push(m);
    }
    Ok((out, report))
}

pub fn write_mood_csv<W: Write>(mut w: W, moods: &[DailyMood]) -> std::io::Result<()> {
    writeln!(w, "{MOOD_CSV_HEADER}")?;
    for m in moods {
        let of = m.of_ratio.map(|v| v.to_string()).unwrap_or_default();
        let g: Vec<String> = m.gpoms.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{},{}", m.date, of, g.join(","))?;
    }
    Ok(())
}

pub fn read_mood_csv<R: BufRead>(reader: R) -> Result<Vec<DailyMood>, ScoreError> {
    let bad = |line: usize, reason: String| ScoreError::Malformed { line, reason };
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == MOOD_CSV_HEADER => {}
        Some((_, Ok(h))) => return Err(bad(1, format!("unexpected header {h:?}"))),
        Some((_, Err(e))) => return Err(bad(1, e.to_string())),
        None => return Err(bad(1, "empty file".into())),
    }
    let mut out: Vec<DailyMood> = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| bad(i + 1, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(bad(i + 1, format!("expected 8 fields, found {}", f.len())));
        }
        let date =
            NaiveDate::parse_from_str(f[0], "%Y-%m-%d").map_err(|e| bad(i + 1, e.to_string()))?;
        let num = |s: &str| -> Result<f64, ScoreError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(i + 1, format!("bad number {s:?}")))
        };
        let of_ratio = if f[1].is_empty() {
            None
        } else {
            Some(num(f[1])?)
        };
        let mut gpoms = [0.0; 6];
        for (k, v) in gpoms.iter_mut().enumerate() {
            *v = num(f[k + 2])?;
        }
        if let Some(prev) = out.last() {
            if prev.date >= date {
                return Err(bad(i + 1, format!("date {date} not after {}", prev.date)));
            }
        }
        out.push(DailyMood {
            date,
            of_ratio,
            gpoms,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicons::{Dimension, MoodLink, Polarity};

    fn day(tokens: &[&[&str]]) -> DailyDocuments {
        DailyDocuments {
            date: NaiveDate::from_ymd_opt(2008, 3, 1).unwrap(),
            documents: tokens
                .iter()
                .map(|d| d.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }

    fn link(base: &str, dim: Dimension, pol: Polarity, w: f64) -> MoodLink {
        MoodLink {
            base_term: base.into(),
            dimension: dim,
            polarity: pol,
            weight: w,
            joint: 1,
            total: 1,
        }
    }

    fn calm_lex() -> GpomsLexicon {
        let mut lex = GpomsLexicon::default();
        lex.entries.insert(
            "calm".into(),
            vec![link("calm", Dimension::Calm, Polarity::Positive, 1.0)],
        );
        lex.entries.insert(
            "angry".into(),
            vec![link("angry", Dimension::Calm, Polarity::Negative, 1.0)],
        );
        lex
    }

    #[test]
    fn of_ratio_examples() {
        let lex = OfLexicon::new(["happy"], ["sad"]);
        assert_eq!(
            score_of_day(&day(&[&["happy", "happy", "sad"]]), &lex),
            Ok(2.0)
        );
        assert!(matches!(
            score_of_day(&day(&[&["happy"]]), &lex),
            Err(ScoreError::NoNegativeEvidence(_))
        ));
        assert_eq!(score_of_day(&day(&[&["sad"]]), &lex), Ok(0.0));
        assert_eq!(
            score_of_day(&day(&[]), &OfLexicon::default()),
            Err(ScoreError::EmptyLexicon)
        );
    }

    #[test]
    fn gpoms_single_match() {
        let g = score_gpoms_day(&day(&[&["calm"]]), &calm_lex(), true);
        assert_eq!(g.values, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.matches, 1);
    }

    #[test]
    fn gpoms_polarity_cancels() {
        let g = score_gpoms_day(&day(&[&["calm", "angry"]]), &calm_lex(), true);
        assert_eq!(g.values[Dimension::Calm.index()], 0.0);
        assert_eq!(g.matches, 2);
    }

    #[test]
    fn gpoms_zero_match_day_flagged() {
        let g = score_gpoms_day(&day(&[&["nothing"]]), &calm_lex(), true);
        assert!(g.is_empty());
        assert_eq!(g.values, [0.0; 6]);
    }

    #[test]
    fn raw_sums_skip_volume_normalization() {
        let g = score_gpoms_day(&day(&[&["calm", "calm", "x"]]), &calm_lex(), false);
        assert_eq!(g.values[0], 2.0);
    }

    #[test]
    fn mood_csv_round_trip_with_missing_of() {
        let moods = vec![
            DailyMood {
                date: NaiveDate::from_ymd_opt(2008, 3, 1).unwrap(),
                of_ratio: Some(1.25),
                gpoms: [0.1, -0.2, 0.3, 0.0, 1.0 / 3.0, -1e-9],
            },
            DailyMood {
                date: NaiveDate::from_ymd_opt(2008, 3, 2).unwrap(),
                of_ratio: None,
                gpoms: [0.0; 6],
            },
        ];
        let mut buf = Vec::new();
        write_mood_csv(&mut buf, &moods).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("2008-03-02,,"));
        assert_eq!(read_mood_csv(buf.as_slice()).unwrap(), moods);
    }
}
