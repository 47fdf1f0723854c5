//! Sentiment and mood lexicons.
//!
//! [`OfLexicon`] is a flat positive/negative word list. [`PomsBase`] holds the
//! base mood terms, each tied to one of six dimensions with a polarity, and
//! [`build_gpoms_lexicon`] expands it with terms that co-occur with base
//! terms inside n-grams.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{source_name} line {line}: {reason}")]
    Malformed {
        source_name: String,
        line: usize,
        reason: String,
    },
    #[error("reading {source_name}: {err}")]
    Io {
        source_name: String,
        err: std::io::Error,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("lexicon json: {0}")]
    Json(#[from] serde_json::Error),
}

/// The six mood dimensions, in their canonical column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Calm,
    Alert,
    Sure,
    Vital,
    Kind,
    Happy,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Calm,
        Dimension::Alert,
        Dimension::Sure,
        Dimension::Vital,
        Dimension::Kind,
        Dimension::Happy,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Calm => "Calm",
            Dimension::Alert => "Alert",
            Dimension::Sure => "Sure",
            Dimension::Vital => "Vital",
            Dimension::Kind => "Kind",
            Dimension::Happy => "Happy",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown mood dimension {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "+1")]
    Positive,
    #[serde(rename = "-1")]
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

fn io_err(source_name: &str) -> impl Fn(std::io::Error) -> LexiconError + '_ {
    move |err| LexiconError::Io {
        source_name: source_name.to_owned(),
        err,
    }
}

fn malformed(source_name: &str, line: usize, reason: impl Into<String>) -> LexiconError {
    LexiconError::Malformed {
        source_name: source_name.to_owned(),
        line,
        reason: reason.into(),
    }
}

/// Iterates `(line_number, trimmed_line)` skipping blanks and `#` comments.
fn content_lines<'a, R: BufRead + 'a>(
    reader: R,
    source_name: &'a str,
) -> impl Iterator<Item = Result<(usize, String), LexiconError>> + 'a {
    reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Err(e) => Some(Err(io_err(source_name)(e))),
            Ok(l) => {
                let t = l.trim_end_matches(['\r', '\n']).trim().to_owned();
                (!t.is_empty() && !t.starts_with('#')).then_some(Ok((i + 1, t)))
            }
        })
}

fn single_token(term: &str) -> bool {
    !term.is_empty() && term.chars().all(|c| c.is_alphanumeric())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfLexicon {
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
    /// Terms listed with both polarities and therefore dropped.
    #[serde(default)]
    pub conflicts: usize,
}

impl OfLexicon {
    /// Builds a lexicon from explicit term lists, dropping terms found in both.
    pub fn new<P, N>(positive: P, negative: N) -> Self
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        N: IntoIterator,
        N::Item: AsRef<str>,
    {
        let mut pos: BTreeSet<String> = positive
            .into_iter()
            .map(|s| s.as_ref().to_lowercase())
            .collect();
        let mut neg: BTreeSet<String> = negative
            .into_iter()
            .map(|s| s.as_ref().to_lowercase())
            .collect();
        let both: Vec<String> = pos.intersection(&neg).cloned().collect();
        for t in &both {
            pos.remove(t);
            neg.remove(t);
        }
        OfLexicon {
            positive: pos,
            negative: neg,
            conflicts: both.len(),
        }
    }

    /// Parses `term<TAB>positive|negative` lines.
    pub fn load<R: BufRead>(reader: R, source_name: &str) -> Result<Self, LexiconError> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for item in content_lines(reader, source_name) {
            let (line, text) = item?;
            let mut parts = text.split('\t').map(str::trim);
            let (Some(term), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(malformed(
                    source_name,
                    line,
                    "expected term<TAB>positive|negative",
                ));
            };
            let term = term.to_lowercase();
            if !single_token(&term) {
                return Err(malformed(
                    source_name,
                    line,
                    format!("term {term:?} is not a single token"),
                ));
            }
            match label.to_ascii_lowercase().as_str() {
                "positive" => pos.push(term),
                "negative" => neg.push(term),
                other => {
                    return Err(malformed(
                        source_name,
                        line,
                        format!("unknown polarity {other:?}"),
                    ))
                }
            }
        }
        Ok(OfLexicon::new(pos, neg))
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.positive {
            out.push_str(&format!("{t}\tpositive\n"));
        }
        for t in &self.negative {
            out.push_str(&format!("{t}\tnegative\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PomsEntry {
    pub term: String,
    pub dimension: Dimension,
    pub polarity: Polarity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PomsBase {
    pub entries: Vec<PomsEntry>,
}

const DEFAULT_POMS_BASE: &str = include_str!("../data/poms_base.tsv");
const DEFAULT_OF_LEXICON: &str = include_str!("../data/of_lexicon.tsv");

impl PomsBase {
    /// Parses `term<TAB>dimension<TAB>+1|-1` lines.
    pub fn load<R: BufRead>(reader: R, source_name: &str) -> Result<Self, LexiconError> {
        let mut entries: Vec<PomsEntry> = Vec::new();
        let mut seen = BTreeSet::new();
        for item in content_lines(reader, source_name) {
            let (line, text) = item?;
            let parts: Vec<&str> = text.split('\t').map(str::trim).collect();
            let [term, dim, pol] = parts[..] else {
                return Err(malformed(
                    source_name,
                    line,
                    "expected term<TAB>dimension<TAB>+1|-1",
                ));
            };
            let term = term.to_lowercase();
            if !single_token(&term) {
                return Err(malformed(
                    source_name,
                    line,
                    format!("term {term:?} is not a single token"),
                ));
            }
            let dimension: Dimension = dim
                .parse()
                .map_err(|e: String| malformed(source_name, line, e))?;
            let polarity = match pol {
                "+1" | "1" => Polarity::Positive,
                "-1" => Polarity::Negative,
                other => {
                    return Err(malformed(
                        source_name,
                        line,
                        format!("polarity must be +1 or -1, got {other:?}"),
                    ))
                }
            };
            if !seen.insert(term.clone()) {
                return Err(malformed(
                    source_name,
                    line,
                    format!("duplicate term {term:?}"),
                ));
            }
            entries.push(PomsEntry {
                term,
                dimension,
                polarity,
            });
        }
        Ok(PomsBase { entries })
    }

    /// Small illustrative base: one positive and one negative term per dimension.
    pub fn bundled() -> Self {
        Self::load(DEFAULT_POMS_BASE.as_bytes(), "bundled base lexicon")
            .expect("bundled base parses")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&PomsEntry> {
        self.entries.iter().find(|e| e.term == term)
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                let p = match e.polarity {
                    Polarity::Positive => "+1",
                    Polarity::Negative => "-1",
                };
                format!("{}\t{}\t{}\n", e.term, e.dimension, p)
            })
            .collect()
    }
}

impl OfLexicon {
    pub fn bundled() -> Self {
        Self::load(DEFAULT_OF_LEXICON.as_bytes(), "bundled sentiment lexicon")
            .expect("bundled lexicon parses")
    }
}

/// One link from an expanded term to a base term. The weight is the exact
/// ratio `joint / total` of n-gram counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoodLink {
    pub base_term: String,
    pub dimension: Dimension,
    pub polarity: Polarity,
    pub weight: f64,
    pub joint: u64,
    pub total: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GpomsLexicon {
    pub entries: BTreeMap<String, Vec<MoodLink>>,
}

impl GpomsLexicon {
    /// Base terms only, each linked to itself with weight 1.
    pub fn from_base(base: &PomsBase) -> Self {
        let entries = base
            .entries
            .iter()
            .map(|e| {
                (
                    e.term.clone(),
                    vec![MoodLink {
                        base_term: e.term.clone(),
                        dimension: e.dimension,
                        polarity: e.polarity,
                        weight: 1.0,
                        joint: 1,
                        total: 1,
                    }],
                )
            })
            .collect();
        GpomsLexicon { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn links(&self, term: &str) -> Option<&[MoodLink]> {
        self.entries.get(term).map(Vec::as_slice)
    }

    pub fn to_json(&self) -> Result<String, LexiconError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let lex: GpomsLexicon = serde_json::from_str(text)?;
        for (term, links) in &lex.entries {
            for l in links {
                if !(l.weight > 0.0 && l.weight <= 1.0) {
                    return Err(LexiconError::InvalidParameter(format!(
                        "term {term:?}: weight {} outside (0, 1]",
                        l.weight
                    )));
                }
            }
        }
        Ok(lex)
    }
}

/// N-gram counts as read from a `w1 w2 w3 [w4 [w5]]<TAB>count` file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NgramCounts {
    pub grams: Vec<(Vec<String>, u64)>,
}

impl NgramCounts {
    pub fn load<R: BufRead>(reader: R, source_name: &str) -> Result<Self, LexiconError> {
        let mut grams = Vec::new();
        for item in content_lines(reader, source_name) {
            let (line, text) = item?;
            let Some((words, count)) = text.rsplit_once('\t') else {
                return Err(malformed(source_name, line, "expected tokens<TAB>count"));
            };
            let count: u64 = count
                .trim()
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| {
                    malformed(
                        source_name,
                        line,
                        format!("count {count:?} is not a positive integer"),
                    )
                })?;
            let tokens: Vec<String> = words.split_whitespace().map(str::to_lowercase).collect();
            if !(3..=5).contains(&tokens.len()) {
                return Err(malformed(
                    source_name,
                    line,
                    format!("expected 3 to 5 tokens, found {}", tokens.len()),
                ));
            }
            grams.push((tokens, count));
        }
        Ok(NgramCounts { grams })
    }

    pub fn to_tsv(&self) -> String {
        self.grams
            .iter()
            .map(|(toks, c)| format!("{}\t{}\n", toks.join(" "), c))
            .collect()
    }
}

/// Outcome details of a lexicon build.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub candidates_seen: usize,
    pub candidates_kept: usize,
    pub truncated: usize,
    pub warnings: Vec<String>,
}

/// Expands `base` with every n-gram token whose co-occurrence weight
/// `w(c, p) = count(c and p) / count(c)` against some base term `p` reaches
/// `min_weight`. Candidates are ranked by their best weight and the result is
/// capped at `max_terms` entries, base terms included.
pub fn build_gpoms_lexicon(
    base: &PomsBase,
    ngrams: &NgramCounts,
    min_weight: f64,
    max_terms: usize,
) -> Result<(GpomsLexicon, BuildReport), LexiconError> {
    if !(min_weight > 0.0 && min_weight <= 1.0) {
        return Err(LexiconError::InvalidParameter(format!(
            "min_weight {min_weight} outside (0, 1]"
        )));
    }
    if max_terms < base.len() {
        return Err(LexiconError::InvalidParameter(format!(
            "max_terms {max_terms} smaller than base size {}",
            base.len()
        )));
    }
    let base_index: HashMap<&str, usize> = base
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.term.as_str(), i))
        .collect();

    // total[c] and joint[c][p] over n-grams; each n-gram counts once per token.
    let mut total: BTreeMap<&str, u64> = BTreeMap::new();
    let mut joint: HashMap<&str, BTreeMap<usize, u64>> = HashMap::new();
    for (tokens, count) in &ngrams.grams {
        let distinct: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        let bases: BTreeSet<usize> = distinct
            .iter()
            .filter_map(|t| base_index.get(t).copied())
            .collect();
        for &tok in &distinct {
            if base_index.contains_key(tok) {
                continue;
            }
            *total.entry(tok).or_default() += count;
            if !bases.is_empty() {
                let row = joint.entry(tok).or_default();
                for &b in &bases {
                    *row.entry(b).or_default() += count;
                }
            }
        }
    }

    let mut report = BuildReport {
        candidates_seen: total.len(),
        ..Default::default()
    };
    let threshold_met = |j: u64, t: u64| (j as f64) >= min_weight * (t as f64) - 1e-12 * (t as f64);

    struct Candidate<'a> {
        term: &'a str,
        best: (u64, u64),
        links: Vec<MoodLink>,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for (&tok, &t) in &total {
        let Some(row) = joint.get(tok) else { continue };
        let links: Vec<MoodLink> = row
            .iter()
            .filter(|&(_, &j)| threshold_met(j, t))
            .map(|(&b, &j)| {
                let e = &base.entries[b];
                MoodLink {
                    base_term: e.term.clone(),
                    dimension: e.dimension,
                    polarity: e.polarity,
                    weight: j as f64 / t as f64,
                    joint: j,
                    total: t,
                }
            })
            .collect();
        if links.is_empty() {
            continue;
        }
        let best = links
            .iter()
            .map(|l| (l.joint, l.total))
            .max_by(|a, b| cmp_ratio(*a, *b))
            .unwrap();
        candidates.push(Candidate {
            term: tok,
            best,
            links,
        });
    }
    // Best weight first, then more evidence, then alphabetical.
    candidates.sort_by(|a, b| {
        cmp_ratio(b.best, a.best)
            .then(b.best.1.cmp(&a.best.1))
            .then(a.term.cmp(b.term))
    });
    let room = max_terms - base.len();
    if candidates.len() > room {
        report.truncated = candidates.len() - room;
        candidates.truncate(room);
    }
    report.candidates_kept = candidates.len();
    if candidates.is_empty() {
        report.warnings.push(
            "no candidate term reached the co-occurrence threshold; lexicon holds base terms only"
                .into(),
        );
    }

    let mut lex = GpomsLexicon::from_base(base);
    for c in candidates {
        lex.entries.insert(c.term.to_owned(), c.links);
    }
    Ok((lex, report))
}

fn cmp_ratio(a: (u64, u64), b: (u64, u64)) -> std::cmp::Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_calm() -> PomsBase {
        PomsBase::load("calm\tCalm\t+1\n".as_bytes(), "t").unwrap()
    }

    #[test]
    fn of_lexicon_two_lines() {
        let lex = OfLexicon::load("happy\tpositive\nsad\tnegative\n".as_bytes(), "t").unwrap();
        assert_eq!(lex.positive.iter().collect::<Vec<_>>(), vec!["happy"]);
        assert_eq!(lex.negative.iter().collect::<Vec<_>>(), vec!["sad"]);
        assert_eq!(lex.conflicts, 0);
    }

    #[test]
    fn of_lexicon_conflicts_dropped() {
        let lex = OfLexicon::load(
            "odd\tpositive\nodd\tnegative\nfine\tpositive\n".as_bytes(),
            "t",
        )
        .unwrap();
        assert!(!lex.positive.contains("odd") && !lex.negative.contains("odd"));
        assert_eq!(lex.conflicts, 1);
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn of_lexicon_malformed_names_line() {
        let err = OfLexicon::load("good\tpositive\nbad line\n".as_bytes(), "of.tsv").unwrap_err();
        match err {
            LexiconError::Malformed {
                line, source_name, ..
            } => {
                assert_eq!(line, 2);
                assert_eq!(source_name, "of.tsv");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(OfLexicon::load("good\tneutral\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn poms_base_parsing() {
        let b = PomsBase::load("calm\tcalm\t+1\nanxious\tCalm\t-1\n".as_bytes(), "t").unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.entries[1].polarity, Polarity::Negative);
        assert!(PomsBase::load("calm\tCalm\t+2\n".as_bytes(), "t").is_err());
        assert!(PomsBase::load("calm\tMoody\t+1\n".as_bytes(), "t").is_err());
        assert!(PomsBase::load("calm\tCalm\t+1\ncalm\tHappy\t+1\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn bundled_base_has_two_terms_per_dimension() {
        let b = PomsBase::bundled();
        assert_eq!(b.len(), 12);
        for d in Dimension::ALL {
            let pols: BTreeSet<_> = b
                .entries
                .iter()
                .filter(|e| e.dimension == d)
                .map(|e| e.polarity)
                .collect();
            assert_eq!(pols.len(), 2, "{d}");
        }
    }

    #[test]
    fn cooccurrence_weight_example() {
        let ngrams =
            NgramCounts::load("i feel so calm\t8\ni feel so angry\t2\n".as_bytes(), "t").unwrap();
        let (lex, report) = build_gpoms_lexicon(&base_calm(), &ngrams, 0.5, 100).unwrap();
        let so = lex.links("so").unwrap();
        assert_eq!(so.len(), 1);
        assert_eq!((so[0].joint, so[0].total), (8, 10));
        assert_eq!(so[0].weight, 0.8);
        assert!(lex.links("angry").is_none());
        let calm = lex.links("calm").unwrap();
        assert_eq!(calm[0].weight, 1.0);
        assert_eq!(calm[0].base_term, "calm");
        assert_eq!(report.candidates_seen, 4);
    }

    #[test]
    fn zero_candidates_warns() {
        let ngrams = NgramCounts::load("a b c\t1\n".as_bytes(), "t").unwrap();
        let (lex, report) = build_gpoms_lexicon(&base_calm(), &ngrams, 0.5, 10).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn max_terms_truncates() {
        let ngrams =
            NgramCounts::load("x calm y\t5\nz calm z\t5\nz q r\t5\n".as_bytes(), "t").unwrap();
        let (lex, report) = build_gpoms_lexicon(&base_calm(), &ngrams, 0.4, 3).unwrap();
        assert_eq!(lex.len(), 3);
        assert!(lex.links("calm").is_some());
        // x, y have weight 1 and beat z (0.5)
        assert!(lex.links("x").is_some() && lex.links("y").is_some());
        assert_eq!(report.truncated, 1);
    }

    #[test]
    fn parameter_checks() {
        let ngrams = NgramCounts::default();
        assert!(build_gpoms_lexicon(&base_calm(), &ngrams, 0.0, 5).is_err());
        assert!(build_gpoms_lexicon(&base_calm(), &ngrams, 1.5, 5).is_err());
        assert!(build_gpoms_lexicon(&PomsBase::bundled(), &ngrams, 0.5, 5).is_err());
    }

    #[test]
    fn ngram_file_validation() {
        assert!(NgramCounts::load("a b\t3\n".as_bytes(), "t").is_err());
        assert!(NgramCounts::load("a b c\t0\n".as_bytes(), "t").is_err());
        assert!(NgramCounts::load("a b c d e f\t1\n".as_bytes(), "t").is_err());
        assert!(NgramCounts::load("a b c\tx\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn lexicon_json_round_trip() {
        let ngrams =
            NgramCounts::load("i feel so calm\t8\ni feel so angry\t2\n".as_bytes(), "t").unwrap();
        let (lex, _) = build_gpoms_lexicon(&base_calm(), &ngrams, 0.5, 100).unwrap();
        let back = GpomsLexicon::from_json(&lex.to_json().unwrap()).unwrap();
        assert_eq!(back, lex);
    }
}
