//! Seeded fixture generators: tweet corpora carrying a latent daily mood,
//! n-gram count files, and price series coupled to one mood dimension at a
//! fixed lag.
//!
//! Each generator draws from its own ChaCha stream of the configured seed,
//! so e.g. prices for a given latent series do not depend on how many tweets
//! were generated.

use std::io::{BufRead, Write};

use chrono::{Datelike, Days, NaiveDate, TimeZone, Utc, Weekday};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{format_tweet_line, RawTweet};
use crate::lexicons::{Dimension, NgramCounts, OfLexicon, Polarity, PomsBase};
use crate::timeseries::PriceRow;

pub const AR_COEF: f64 = 0.7;
pub const LATENT_CSV_HEADER: &str = "date,calm,alert,sure,vital,kind,happy";

/// Logistic gain mapping a latent value to the chance of a positive term.
const POLE_GAIN: f64 = 1.5;
const TERM_PROB: f64 = 0.5;
const OF_TERM_PROB: f64 = 0.7;
const SYNONYM_PROB: f64 = 0.5;
const URL_TWEET_PROB: f64 = 0.05;
const PLAIN_TWEET_PROB: f64 = 0.05;

const STREAM_LATENT: u64 = 1;
const STREAM_CORPUS: u64 = 2;
const STREAM_PRICES: u64 = 3;
const STREAM_NGRAMS: u64 = 4;

const PHRASES: [&str; 7] = [
    "i feel",
    "i am feeling",
    "i'm feeling",
    "i'm",
    "im",
    "i am",
    "makes me",
];
const FILLERS: [&str; 14] = [
    "today", "really", "work", "morning", "tonight", "week", "coffee", "lunch", "weather",
    "weekend", "news", "game", "home", "people",
];

/// Near-synonyms used to expand the bundled base terms.
pub fn synonyms(term: &str) -> &'static [&'static str] {
    match term {
        "calm" => &["relaxed", "serene"],
        "anxious" => &["nervous", "worried"],
        "alert" => &["focused", "attentive"],
        "confused" => &["foggy", "muddled"],
        "confident" => &["certain", "assured"],
        "unsure" => &["doubtful", "hesitant"],
        "energetic" => &["lively", "vigorous"],
        "tired" => &["exhausted", "drained"],
        "kind" => &["friendly", "caring"],
        "hostile" => &["angry", "bitter"],
        "happy" => &["joyful", "cheerful"],
        "depressed" => &["gloomy", "miserable"],
        _ => &[],
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("latent file line {line}: {reason}")]
    LatentFormat { line: usize, reason: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub dimension: Dimension,
    pub lag: usize,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub start: NaiveDate,
    pub n_days: usize,
    pub tweets_per_day: usize,
    pub coupling: Coupling,
    pub noise_std: f64,
    pub start_close: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            start: NaiveDate::from_ymd_opt(2008, 2, 28).expect("valid date"),
            n_days: 200,
            tweets_per_day: 100,
            coupling: Coupling {
                dimension: Dimension::Calm,
                lag: 3,
                strength: 60.0,
            },
            noise_std: 20.0,
            start_close: 12_000.0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.coupling.lag < 1 {
            return bad("lag must be at least 1".into());
        }
        if self.n_days <= self.coupling.lag + 10 {
            return bad(format!("n_days {} must exceed lag + 10", self.n_days));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise_std {} must be non-negative", self.noise_std));
        }
        if !self.coupling.strength.is_finite() || !self.start_close.is_finite() {
            return bad("strength and start_close must be finite".into());
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        (0..self.n_days)
            .map(|i| self.start + Days::new(i as u64))
            .collect()
    }
}

/// Ground-truth daily mood, one AR(1) series per dimension with unit
/// stationary variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentMood {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<[f64; 6]>,
}

impl LatentMood {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn series(&self, d: Dimension) -> Vec<f64> {
        self.values.iter().map(|v| v[d.index()]).collect()
    }

    pub fn get(&self, date: NaiveDate, d: Dimension) -> Option<f64> {
        self.dates
            .binary_search(&date)
            .ok()
            .map(|i| self.values[i][d.index()])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{LATENT_CSV_HEADER}")?;
        for (date, v) in self.dates.iter().zip(&self.values) {
            writeln!(
                w,
                "{date},{},{},{},{},{},{}",
                v[0], v[1], v[2], v[3], v[4], v[5]
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self, SynthError> {
        let mut out = LatentMood {
            dates: Vec::new(),
            values: Vec::new(),
        };
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let bad = |reason: &str| SynthError::LatentFormat {
                line: i + 1,
                reason: reason.to_owned(),
            };
            if i == 0 {
                if line.trim() != LATENT_CSV_HEADER {
                    return Err(bad("unexpected header"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(bad("expected 7 fields"));
            }
            let date = fields[0].parse().map_err(|_| bad("bad date"))?;
            let mut v = [0.0; 6];
            for (slot, f) in v.iter_mut().zip(&fields[1..]) {
                *slot = f.parse().map_err(|_| bad("bad number"))?;
            }
            out.dates.push(date);
            out.values.push(v);
        }
        Ok(out)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn generate_latent(cfg: &GenConfig) -> Result<LatentMood, SynthError> {
    cfg.validate()?;
    let mut rng = cfg.rng(STREAM_LATENT);
    let innovation = (1.0 - AR_COEF * AR_COEF).sqrt();
    let mut state: [f64; 6] = std::array::from_fn(|_| normal(&mut rng));
    let mut values = Vec::with_capacity(cfg.n_days);
    for i in 0..cfg.n_days {
        if i > 0 {
            for s in &mut state {
                *s = AR_COEF * *s + innovation * normal(&mut rng);
            }
        }
        values.push(state);
    }
    Ok(LatentMood {
        dates: cfg.dates(),
        values,
    })
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

struct TermTable {
    /// Per dimension: (positive terms, negative terms), base and synonyms.
    poles: [(Vec<String>, Vec<String>); 6],
    of_pos: Vec<String>,
    of_neg: Vec<String>,
}

impl TermTable {
    fn new(base: &PomsBase, of: &OfLexicon) -> Self {
        let mut poles: [(Vec<String>, Vec<String>); 6] = Default::default();
        for e in &base.entries {
            let slot = &mut poles[e.dimension.index()];
            match e.polarity {
                Polarity::Positive => slot.0.push(e.term.clone()),
                Polarity::Negative => slot.1.push(e.term.clone()),
            }
        }
        TermTable {
            poles,
            of_pos: of.positive.iter().cloned().collect(),
            of_neg: of.negative.iter().cloned().collect(),
        }
    }

    fn pick_mood_term(&self, rng: &mut ChaCha8Rng, d: usize, positive: bool) -> Option<String> {
        let (pos, neg) = &self.poles[d];
        let base = if positive { pos } else { neg }.choose(rng)?;
        let syns = synonyms(base);
        if !syns.is_empty() && rng.random_bool(SYNONYM_PROB) {
            Some((*syns.choose(rng).expect("non-empty")).to_owned())
        } else {
            Some(base.clone())
        }
    }
}

fn mood_words(rng: &mut ChaCha8Rng, table: &TermTable, z: &[f64; 6]) -> Vec<String> {
    let mut words = Vec::new();
    for (d, &zd) in z.iter().enumerate() {
        if rng.random_bool(TERM_PROB) {
            let positive = rng.random_bool(logistic(POLE_GAIN * zd));
            if let Some(w) = table.pick_mood_term(rng, d, positive) {
                words.push(w);
            }
        }
    }
    if rng.random_bool(OF_TERM_PROB) {
        let positive = rng.random_bool(logistic(POLE_GAIN * z[Dimension::Happy.index()]));
        let pool = if positive {
            &table.of_pos
        } else {
            &table.of_neg
        };
        if let Some(w) = pool.choose(rng) {
            words.push(w.clone());
        }
    }
    for _ in 0..rng.random_range(1..=2) {
        words.push((*FILLERS.choose(rng).expect("non-empty")).to_owned());
    }
    // Fisher-Yates for word order
    for i in (1..words.len()).rev() {
        let j = rng.random_range(0..=i);
        words.swap(i, j);
    }
    words
}

/// Draws the latent mood and a corpus expressing it. Most tweets carry a
/// mood phrase; a few carry a link or no phrase and should be filtered out.
pub fn generate_corpus(
    cfg: &GenConfig,
    base: &PomsBase,
    of: &OfLexicon,
) -> Result<(Vec<RawTweet>, LatentMood), SynthError> {
    let latent = generate_latent(cfg)?;
    let table = TermTable::new(base, of);
    let mut rng = cfg.rng(STREAM_CORPUS);
    let mut tweets = Vec::with_capacity(cfg.n_days * cfg.tweets_per_day);
    let mut id: u64 = 1_000_000;
    for (date, z) in latent.dates.iter().zip(&latent.values) {
        let midnight = Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("valid time"));
        let mut seconds: Vec<u32> = (0..cfg.tweets_per_day)
            .map(|_| rng.random_range(0..86_400))
            .collect();
        seconds.sort_unstable();
        for s in seconds {
            id += 1;
            let roll: f64 = rng.random();
            let words = mood_words(&mut rng, &table, z).join(" ");
            let phrase = *PHRASES.choose(&mut rng).expect("non-empty");
            let text = if roll < URL_TWEET_PROB {
                format!(
                    "{phrase} {words} http://bit.ly/{:06x}",
                    rng.random_range(0..0xff_ffff)
                )
            } else if roll < URL_TWEET_PROB + PLAIN_TWEET_PROB {
                format!("so much {words}")
            } else {
                format!("{phrase} {words}")
            };
            tweets.push(RawTweet {
                id: id.to_string(),
                timestamp: midnight + chrono::Duration::seconds(s as i64),
                text,
            });
        }
    }
    Ok((tweets, latent))
}

pub fn write_corpus<W: Write>(mut w: W, tweets: &[RawTweet]) -> std::io::Result<()> {
    for t in tweets {
        writeln!(w, "{}", format_tweet_line(t))?;
    }
    Ok(())
}

pub fn is_trading_day(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

/// Closing prices over the weekdays of the configured range. Steps are
/// indexed by trading row, so the lag counts rows:
/// `close[i] = close[i-1] + strength * mood(date[i-lag]) + noise`.
pub fn generate_prices(cfg: &GenConfig, latent: &LatentMood) -> Result<Vec<PriceRow>, SynthError> {
    cfg.validate()?;
    let mut rng = cfg.rng(STREAM_PRICES);
    let dates: Vec<NaiveDate> = cfg
        .dates()
        .into_iter()
        .filter(|d| is_trading_day(*d))
        .collect();
    let c = cfg.coupling;
    let mut rows: Vec<PriceRow> = Vec::with_capacity(dates.len());
    let mut close = cfg.start_close;
    for (i, &date) in dates.iter().enumerate() {
        let open = close;
        if i > 0 {
            let drive = if i >= c.lag {
                latent.get(dates[i - c.lag], c.dimension).ok_or_else(|| {
                    SynthError::InvalidConfig(format!(
                        "latent mood missing for {}",
                        dates[i - c.lag]
                    ))
                })?
            } else {
                0.0
            };
            close += c.strength * drive + cfg.noise_std * normal(&mut rng);
        }
        let wick = cfg.noise_std * 0.25;
        let high = open.max(close) + wick * rng.random::<f64>();
        let low = open.min(close) - wick * rng.random::<f64>();
        rows.push(PriceRow {
            date,
            open,
            high,
            low,
            close,
            volume: rng.random_range(2_000_000_000..6_000_000_000u64),
        });
    }
    Ok(rows)
}

/// N-gram counts in which each synonym mostly co-occurs with its base term,
/// plus filler n-grams that tie weakly to everything.
pub fn generate_ngrams(cfg: &GenConfig, base: &PomsBase) -> NgramCounts {
    let mut rng = cfg.rng(STREAM_NGRAMS);
    let mut grams = Vec::new();
    let antonym = |e: &crate::lexicons::PomsEntry| {
        base.entries
            .iter()
            .find(|o| o.dimension == e.dimension && o.polarity != e.polarity)
            .map(|o| o.term.clone())
    };
    let words = |v: &[&str]| v.iter().map(|s| (*s).to_owned()).collect::<Vec<String>>();
    for e in &base.entries {
        grams.push((words(&["i", "feel", &e.term]), rng.random_range(500..2_000)));
        for s in synonyms(&e.term) {
            let filler = *FILLERS.choose(&mut rng).expect("non-empty");
            grams.push((
                words(&["feeling", s, "and", &e.term]),
                rng.random_range(200..400),
            ));
            grams.push((words(&["so", s, filler]), rng.random_range(20..100)));
            if let Some(a) = antonym(e) {
                grams.push((words(&[s, "not", &a]), rng.random_range(5..20)));
            }
        }
    }
    for _ in 0..40 {
        let g: Vec<&str> = (0..3)
            .map(|_| *FILLERS.choose(&mut rng).expect("non-empty"))
            .collect();
        grams.push((words(&g), rng.random_range(10..500)));
    }
    NgramCounts { grams }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{classify, Rejection};

    fn cfg() -> GenConfig {
        GenConfig {
            n_days: 30,
            tweets_per_day: 20,
            ..GenConfig::default()
        }
    }

    #[test]
    fn same_seed_same_output() {
        let (a, la) = generate_corpus(&cfg(), &PomsBase::bundled(), &OfLexicon::bundled()).unwrap();
        let (b, lb) = generate_corpus(&cfg(), &PomsBase::bundled(), &OfLexicon::bundled()).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
        assert_eq!(
            generate_prices(&cfg(), &la).unwrap(),
            generate_prices(&cfg(), &lb).unwrap()
        );
    }

    #[test]
    fn zero_tweets_is_empty() {
        let c = GenConfig {
            tweets_per_day: 0,
            ..cfg()
        };
        let (t, latent) = generate_corpus(&c, &PomsBase::bundled(), &OfLexicon::bundled()).unwrap();
        assert!(t.is_empty());
        assert_eq!(latent.len(), 30);
    }

    #[test]
    fn fifteen_days_has_at_most_eleven_rows() {
        let c = GenConfig {
            n_days: 15,
            ..cfg()
        };
        let latent = generate_latent(&c).unwrap();
        let rows = generate_prices(&c, &latent).unwrap();
        assert!(rows.len() <= 11);
        assert!(rows.iter().all(|r| is_trading_day(r.date)));
    }

    #[test]
    fn config_preconditions() {
        let mut c = cfg();
        c.coupling.lag = 0;
        assert!(c.validate().is_err());
        let c = GenConfig {
            n_days: 13,
            ..cfg()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn filter_mix_present() {
        let (t, _) = generate_corpus(&cfg(), &PomsBase::bundled(), &OfLexicon::bundled()).unwrap();
        let outcomes: Vec<_> = t.iter().map(|t| classify(&t.text)).collect();
        assert!(outcomes.iter().any(|o| o.is_ok()));
        assert!(outcomes.contains(&Err(Rejection::Url)));
        assert!(outcomes.contains(&Err(Rejection::NoPhrase)));
    }

    #[test]
    fn latent_csv_round_trip() {
        let l = generate_latent(&cfg()).unwrap();
        let mut buf = Vec::new();
        l.write_csv(&mut buf).unwrap();
        assert_eq!(LatentMood::read_csv(buf.as_slice()).unwrap(), l);
    }
}
