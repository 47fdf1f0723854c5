//! Public-mood time series from short-text corpora, linear causality tests
//! against stock-index changes, and a self-organizing fuzzy neural network
//! for index forecasting.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! - [`corpus`]: mood-statement filtering, tokenization, grouping by UTC day
//! - [`lexicons`]: positive/negative lexicon loading and six-dimension mood
//!   lexicon expansion from n-gram co-occurrence counts
//! - [`scoring`]: daily ratio and weighted-sum mood scores
//! - [`timeseries`]: local z-scores, index deltas, panel alignment, unit scaling
//! - [`econometrics`]: OLS with inference, Granger tests, nested F-tests, binomial odds
//! - [`sofnn`]: the five-layer fuzzy network with online structure learning
//! - [`forecast`]: lagged input sets, experiments, MAPE and direction accuracy
//! - [`synthgen`]: seeded fixture generators with planted mood→price coupling

pub mod corpus;
pub mod econometrics;
mod error;
pub mod forecast;
pub mod lexicons;
pub mod linalg;
pub mod scoring;
pub mod sofnn;
pub mod synthgen;
pub mod timeseries;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use corpus::{DailyDocuments, IngestReport, RawTweet};
pub use econometrics::{GrangerRow, OlsFit};
pub use error::{Error, ErrorKind, Result};
pub use forecast::{EvalReport, InputSpec};
pub use lexicons::{Dimension, GpomsLexicon, OfLexicon, PomsBase};
pub use scoring::DailyMood;
pub use sofnn::{SofnnModel, SofnnParams};
pub use timeseries::{MoodPanel, TimeSeries};
