use thiserror::Error;

use crate::corpus::CorpusError;
use crate::econometrics::EconError;
use crate::forecast::ForecastError;
use crate::lexicons::LexiconError;
use crate::scoring::ScoreError;
use crate::sofnn::SofnnError;
use crate::synthgen::SynthError;
use crate::timeseries::TimeSeriesError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or missing input data.
    Data,
    /// A computation could not be carried out (singular design, degenerate series).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    TimeSeries(#[from] TimeSeriesError),
    #[error(transparent)]
    Econ(#[from] EconError),
    #[error(transparent)]
    Sofnn(#[from] SofnnError),
    #[error(transparent)]
    Forecast(#[from] ForecastError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Corpus(_) | Error::Lexicon(_) | Error::Synth(_) => ErrorKind::Data,
            Error::Score(ScoreError::NoNegativeEvidence(_)) => ErrorKind::Numerical,
            Error::Score(_) => ErrorKind::Data,
            Error::TimeSeries(e) => e.kind(),
            Error::Econ(_) => ErrorKind::Numerical,
            Error::Sofnn(e) => e.kind(),
            Error::Forecast(e) => e.kind(),
        }
    }
}
