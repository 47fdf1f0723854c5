//! Tweet ingestion: mood-statement and spam filtering, tokenization, and
//! grouping by GMT+0 calendar day.
//!
//! Input records are tab-separated lines `id<TAB>timestamp<TAB>text`, where
//! tabs, newlines and backslashes inside the text are escaped as `\t`, `\n`
//! and `\\`.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::sync::LazyLock;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Historical length limit; longer texts are accepted but counted.
pub const MAX_TWEET_CHARS: usize = 140;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

static MOOD_PHRASE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(?:i feel|i am feeling|i['’]m feeling|i dont feel|i['’]m|im|i am|makes me)\b",
    )
    .expect("static pattern")
});

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("reading corpus: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyDocuments {
    pub date: NaiveDate,
    pub documents: Vec<Vec<String>>,
}

impl DailyDocuments {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().flatten().map(String::as_str)
    }
}

/// Counts collected while reading and filtering a corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub read: usize,
    pub filtered_in: usize,
    pub dropped_url: usize,
    pub dropped_no_phrase: usize,
    pub unparseable: usize,
    /// Kept tweets longer than [`MAX_TWEET_CHARS`].
    pub over_length: usize,
    /// First few record-level problems, as `line N: reason`.
    pub errors: Vec<String>,
}

const MAX_REPORTED_ERRORS: usize = 50;

impl IngestReport {
    fn record_error(&mut self, line: usize, reason: impl std::fmt::Display) {
        self.unparseable += 1;
        if self.errors.len() < MAX_REPORTED_ERRORS {
            self.errors.push(format!("line {line}: {reason}"));
        }
    }
}

/// A set of lowercase stop-words.
#[derive(Clone, Debug, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// The bundled English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

pub fn has_url(text: &str) -> bool {
    let lower = text.to_lowercase();
    lower.contains("http:") || lower.contains("www.")
}

pub fn has_mood_phrase(text: &str) -> bool {
    MOOD_PHRASE.is_match(text)
}

/// Why a tweet was rejected by [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    Url,
    NoPhrase,
}

/// URL check first, then phrase check; both run on the raw text.
pub fn classify(text: &str) -> Result<(), Rejection> {
    if has_url(text) {
        Err(Rejection::Url)
    } else if !has_mood_phrase(text) {
        Err(Rejection::NoPhrase)
    } else {
        Ok(())
    }
}

/// Keeps tweets that state a mood and carry no link, preserving order.
pub fn filter_mood_tweets(tweets: &[RawTweet]) -> Vec<RawTweet> {
    tweets
        .iter()
        .filter(|t| classify(&t.text).is_ok())
        .cloned()
        .collect()
}

/// Lowercases, turns every non-alphanumeric character into a separator and
/// drops stop-words.
pub fn normalize_text(text: &str, stopwords: &Stopwords) -> Vec<String> {
    let cleaned: String = text
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned
        .split_whitespace()
        .filter(|tok| !stopwords.contains(tok))
        .map(str::to_owned)
        .collect()
}

/// One group per UTC calendar day, ascending. Within a day, documents are
/// ordered by tweet id so that sharded ingestion merges deterministically.
pub fn group_by_day(tweets: &[RawTweet], stopwords: &Stopwords) -> Vec<DailyDocuments> {
    let mut days: BTreeMap<NaiveDate, Vec<&RawTweet>> = BTreeMap::new();
    for t in tweets {
        days.entry(t.timestamp.date_naive()).or_default().push(t);
    }
    days.into_iter()
        .map(|(date, mut group)| {
            group.sort_by(|a, b| a.id.cmp(&b.id));
            DailyDocuments {
                date,
                documents: group
                    .iter()
                    .map(|t| normalize_text(&t.text, stopwords))
                    .collect(),
            }
        })
        .collect()
}

/// Accepts RFC 3339 (any offset, converted to UTC) plus the common
/// seconds-less `YYYY-MM-DDTHH:MMZ` and naive `YYYY-MM-DD HH:MM:SS` forms,
/// the latter taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    let naive = s.strip_suffix('Z').unwrap_or(s);
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(naive, fmt) {
            return Some(dt.and_utc());
        }
    }
    None
}

pub fn unescape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Serializes one tweet as a corpus line (without the trailing newline).
pub fn format_tweet_line(t: &RawTweet) -> String {
    format!(
        "{}\t{}\t{}",
        escape_field(&t.id),
        t.timestamp.format("%Y-%m-%dT%H:%M:%SZ"),
        escape_field(&t.text)
    )
}

pub fn parse_tweet_line(line: &str) -> Result<RawTweet, String> {
    let mut fields = line.splitn(3, '\t');
    let (Some(id), Some(ts), Some(text)) = (fields.next(), fields.next(), fields.next()) else {
        return Err("expected 3 tab-separated fields".into());
    };
    let timestamp = parse_timestamp(ts).ok_or_else(|| format!("unparseable timestamp {ts:?}"))?;
    let text = unescape_field(text);
    if text.trim().is_empty() {
        return Err("empty text".into());
    }
    if id.is_empty() {
        return Err("empty id".into());
    }
    Ok(RawTweet {
        id: unescape_field(id),
        timestamp,
        text,
    })
}

/// Reads a corpus, applying the mood and URL filters as it goes. Records that
/// do not parse are skipped and counted; only I/O failures are fatal.
pub fn read_filtered<R: BufRead>(reader: R) -> Result<(Vec<RawTweet>, IngestReport), CorpusError> {
    let mut report = IngestReport::default();
    let mut kept = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        report.read += 1;
        let tweet = match parse_tweet_line(line) {
            Ok(t) => t,
            Err(reason) => {
                report.record_error(idx + 1, reason);
                continue;
            }
        };
        match classify(&tweet.text) {
            Err(Rejection::Url) => report.dropped_url += 1,
            Err(Rejection::NoPhrase) => report.dropped_no_phrase += 1,
            Ok(()) => {
                if tweet.text.chars().count() > MAX_TWEET_CHARS {
                    report.over_length += 1;
                }
                report.filtered_in += 1;
                kept.push(tweet);
            }
        }
    }
    Ok((kept, report))
}

/// Full ingestion: read, filter, tokenize, group.
pub fn ingest<R: BufRead>(
    reader: R,
    stopwords: &Stopwords,
) -> Result<(Vec<DailyDocuments>, IngestReport), CorpusError> {
    let (tweets, report) = read_filtered(reader)?;
    Ok((group_by_day(&tweets, stopwords), report))
}

/// Writes grouped documents as JSON lines, one day per line.
pub fn write_documents<W: std::io::Write>(
    mut w: W,
    days: &[DailyDocuments],
) -> std::io::Result<()> {
    for day in days {
        serde_json::to_writer(&mut w, day)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_documents<R: BufRead>(reader: R) -> Result<Vec<DailyDocuments>, CorpusError> {
    let mut days: Vec<DailyDocuments> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let day: DailyDocuments =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        if let Some(prev) = days.last() {
            if prev.date >= day.date {
                return Err(CorpusError::Malformed {
                    line: idx + 1,
                    reason: format!("date {} not after {}", day.date, prev.date),
                });
            }
        }
        days.push(day);
    }
    Ok(days)
}
