use std::io::Cursor;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use moodcast::corpus::{self, Stopwords};
use moodcast::econometrics::{self, granger_bivariate, report as econ_report};
use moodcast::forecast::{self, ExperimentOptions, InputSpec};
use moodcast::lexicons::{build_gpoms_lexicon, NgramCounts};
use moodcast::scoring::{self, ScoreOptions};
use moodcast::sofnn::{self, SofnnParams, TrainOptions};
use moodcast::synthgen::{self, Coupling, GenConfig};
use moodcast::timeseries::{self, mean_std, Column, Window};
use moodcast::{DailyMood, Dimension, GpomsLexicon, MoodPanel, OfLexicon, PomsBase, TimeSeries};

use crate::error::{CliError, Context};
use crate::manifest::Run;
use crate::plot::{stacked_chart, Series};

#[derive(Debug, Parser)]
#[command(
    name = "moodcast",
    version,
    about = "Daily mood series, causality tests and fuzzy-network index forecasts"
)]
pub struct Cli {
    /// Directory for every output file.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Print a JSON object to stdout instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// key=value defaults; flags on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for generated fixtures.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter a tweet TSV to mood statements and group tokens by UTC day.
    #[command(args_override_self = true)]
    Ingest(IngestArgs),
    /// Expand the six-dimension base lexicon from n-gram co-occurrences.
    #[command(args_override_self = true)]
    BuildLexicon(BuildLexiconArgs),
    /// Score grouped documents into daily OF and mood values.
    #[command(args_override_self = true)]
    Score(ScoreArgs),
    /// Z-score daily moods and align them with index deltas.
    #[command(args_override_self = true)]
    Normalize(NormalizeArgs),
    /// Granger tests of each mood column against index deltas.
    #[command(args_override_self = true)]
    Granger(GrangerArgs),
    /// Regress OF on the six mood dimensions.
    #[command(args_override_self = true)]
    Regress(RegressArgs),
    /// Train one forecasting network and save it.
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Train and score every input set on a held-out tail.
    #[command(args_override_self = true)]
    Evaluate(EvaluateArgs),
    /// Write a synthetic corpus and prices with a planted mood coupling.
    #[command(args_override_self = true)]
    Synth(SynthArgs),
    /// Render mood tracking and lagged-mood overlay charts as SVG.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::BuildLexicon(_) => "build-lexicon",
            Command::Score(_) => "score",
            Command::Normalize(_) => "normalize",
            Command::Granger(_) => "granger",
            Command::Regress(_) => "regress",
            Command::Train(_) => "train",
            Command::Evaluate(_) => "evaluate",
            Command::Synth(_) => "synth",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// Tweet file: id, timestamp, text separated by tabs.
    #[arg(long)]
    pub corpus: PathBuf,
    /// One stopword per line; defaults to a built-in English list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildLexiconArgs {
    /// Base lexicon TSV (term, dimension, polarity); defaults to the bundled one.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// N-gram counts TSV.
    #[arg(long)]
    pub ngrams: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub min_weight: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_terms: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// documents.jsonl from `ingest`.
    #[arg(long)]
    pub docs: PathBuf,
    /// Positive/negative lexicon TSV; defaults to the bundled one.
    #[arg(long)]
    pub of_lexicon: Option<PathBuf>,
    /// Expanded lexicon from `build-lexicon`.
    #[arg(long, conflicts_with = "base")]
    pub gpoms: Option<PathBuf>,
    /// Score with the unexpanded base lexicon from this TSV.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Keep weighted sums instead of dividing by the day's match count.
    #[arg(long)]
    pub raw_sums: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PanelSource {
    /// mood.csv from `score`.
    #[arg(long)]
    pub mood: Option<PathBuf>,
    /// Price CSV with Date and Close columns.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// Half-width of the local z-score window; raw values when absent.
    #[arg(long)]
    pub zscore_k: Option<usize>,
    /// Use a trailing window (past values only).
    #[arg(long)]
    pub causal: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub mood: PathBuf,
    #[arg(long)]
    pub prices: PathBuf,
    #[arg(long)]
    pub zscore_k: usize,
    #[arg(long)]
    pub causal: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GrangerArgs {
    /// panel.csv from `normalize`; replaces --mood/--prices.
    #[arg(long, conflicts_with_all = ["mood", "prices"])]
    pub panel: Option<PathBuf>,
    #[command(flatten)]
    pub source: PanelSource,
    /// `1..7`, `1..=7` or `1,2,5`.
    #[arg(long, default_value = "1..=7")]
    pub lags: String,
    /// Comma-separated panel columns to test.
    #[arg(long, default_value = "OF,Calm,Alert,Sure,Vital,Kind,Happy")]
    pub columns: String,
}

#[derive(Debug, Args, Serialize)]
pub struct RegressArgs {
    #[arg(long, conflicts_with_all = ["mood", "prices"])]
    pub panel: Option<PathBuf>,
    #[command(flatten)]
    pub source: PanelSource,
}

#[derive(Debug, Args, Serialize)]
pub struct SofnnArgs {
    /// Error threshold for structure changes.
    #[arg(long, default_value_t = 0.04)]
    pub delta: f64,
    /// Width of a new neuron.
    #[arg(long, default_value_t = 0.01)]
    pub sigma0: f64,
    /// Target training RMSE.
    #[arg(long, default_value_t = 0.05)]
    pub k_rmse: f64,
    /// Coverage distance: one value for every input, or a comma list.
    #[arg(long, default_value = "0.1")]
    pub k_d: String,
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Skip the final shrinkage refit of the consequents.
    #[arg(long)]
    pub no_consolidate: bool,
}

impl SofnnArgs {
    fn params(&self) -> Result<SofnnParams, CliError> {
        let k_d = parse_floats(&self.k_d).map_err(|e| CliError::Usage(format!("--k-d: {e}")))?;
        Ok(SofnnParams {
            delta: self.delta,
            sigma0: self.sigma0,
            k_rmse: self.k_rmse,
            k_d,
        })
    }

    fn options(&self) -> TrainOptions {
        TrainOptions {
            epochs: self.epochs,
            consolidate: !self.no_consolidate,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: PanelSource,
    /// Input set name (I0, I1, I1_2 .. I1_6, IOF).
    #[arg(long, default_value = "I1")]
    pub spec: String,
    /// First test date; the last 15 rows when absent.
    #[arg(long)]
    pub split_date: Option<NaiveDate>,
    #[command(flatten)]
    pub sofnn: SofnnArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub source: PanelSource,
    /// Comma-separated input sets; all eight when absent.
    #[arg(long)]
    pub specs: Option<String>,
    #[arg(long)]
    pub split_date: Option<NaiveDate>,
    /// Continue learning online from each realized test day.
    #[arg(long)]
    pub rolling: bool,
    /// Independent windows for the odds adjustment; rows over test rows when absent.
    #[arg(long)]
    pub n_periods: Option<f64>,
    #[command(flatten)]
    pub sofnn: SofnnArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub days: usize,
    #[arg(long, default_value_t = 100)]
    pub tweets_per_day: usize,
    /// Trading rows between a mood value and the price step it drives.
    #[arg(long, default_value_t = 3)]
    pub lag: usize,
    /// Price step per unit of latent mood; three times --noise when absent.
    #[arg(long)]
    pub strength: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub noise: f64,
    #[arg(long, default_value = "Calm")]
    pub dimension: String,
    #[arg(long, default_value = "2008-02-28")]
    pub start: NaiveDate,
    #[arg(long, default_value_t = 12_000.0)]
    pub start_close: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub mood: PathBuf,
    #[arg(long)]
    pub prices: PathBuf,
    #[arg(long)]
    pub zscore_k: Option<usize>,
    #[arg(long)]
    pub causal: bool,
    /// Panel rows by which the mood overlay is shifted.
    #[arg(long, default_value_t = 3)]
    pub lag: usize,
    #[arg(long, default_value = "Calm")]
    pub dimension: String,
}

/// What a subcommand prints: a human table or a JSON object.
pub struct Outcome {
    pub human: String,
    pub json: Value,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut run = Run::new(&cli.out_dir)?;
    let name = cli.command.name();
    let (mut outcome, params) = match &cli.command {
        Command::Ingest(a) => (ingest(&mut run, a)?, to_value(a)),
        Command::BuildLexicon(a) => (build_lexicon(&mut run, a)?, to_value(a)),
        Command::Score(a) => (score(&mut run, a)?, to_value(a)),
        Command::Normalize(a) => (normalize(&mut run, a)?, to_value(a)),
        Command::Granger(a) => (granger(&mut run, a)?, to_value(a)),
        Command::Regress(a) => (regress(&mut run, a)?, to_value(a)),
        Command::Train(a) => (train(&mut run, a)?, to_value(a)),
        Command::Evaluate(a) => (evaluate(&mut run, a)?, to_value(a)),
        Command::Synth(a) => (synth(&mut run, a, cli.seed.unwrap_or(0))?, to_value(a)),
        Command::Report(a) => (report(&mut run, a)?, to_value(a)),
    };
    if let Value::Object(map) = &mut outcome.json {
        map.insert("outputs".into(), json!(run.output_paths()));
    }
    let parameters = json!({
        "global": { "out_dir": cli.out_dir, "seed": cli.seed, "config": cli.config },
        name: params,
    });
    run.finish(name, parameters)?;
    Ok(outcome)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("arguments serialize")
}

fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s.into_bytes()
}

fn utf8(path: &Path, data: Vec<u8>) -> Result<String, CliError> {
    String::from_utf8(data)
        .map_err(|_| CliError::Data(format!("{}: not valid UTF-8", path.display())))
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {t:?}"))
        })
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

/// `a..b` and `a..=b` are both inclusive; otherwise a comma list.
pub fn parse_lags(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad lag {t:?}"))
    };
    let lags: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty lag range {s:?}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if lags.contains(&0) {
        return Err("lags start at 1".into());
    }
    Ok(lags)
}

fn parse_dimension(s: &str) -> Result<Dimension, CliError> {
    s.parse::<Dimension>()
        .map_err(|e| CliError::Usage(format!("--dimension: {e}")))
}

fn load_moods(run: &mut Run, path: &Path) -> Result<Vec<DailyMood>, CliError> {
    let data = run.read(path)?;
    scoring::read_mood_csv(Cursor::new(data)).at(path)
}

fn load_prices(run: &mut Run, path: &Path) -> Result<TimeSeries, CliError> {
    let data = run.read(path)?;
    timeseries::read_price_csv(Cursor::new(data)).at(path)
}

fn window(causal: bool) -> Window {
    if causal {
        Window::Trailing
    } else {
        Window::Centered
    }
}

fn panel_from(
    run: &mut Run,
    mood: &Path,
    prices: &Path,
    k: Option<usize>,
    causal: bool,
) -> Result<MoodPanel, CliError> {
    let mut moods = load_moods(run, mood)?;
    let closes = load_prices(run, prices)?;
    if let Some(k) = k {
        moods = timeseries::zscore_moods(&moods, k, window(causal)).at(mood)?;
    }
    timeseries::align_panel(&moods, &closes).context(format!(
        "aligning {} with {}",
        mood.display(),
        prices.display()
    ))
}

fn source_panel(run: &mut Run, src: &PanelSource) -> Result<MoodPanel, CliError> {
    match (&src.mood, &src.prices) {
        (Some(m), Some(p)) => panel_from(run, m, p, src.zscore_k, src.causal),
        _ => Err(CliError::Usage(
            "--mood and --prices are both required".into(),
        )),
    }
}

fn panel_or_source(
    run: &mut Run,
    panel: &Option<PathBuf>,
    src: &PanelSource,
) -> Result<MoodPanel, CliError> {
    match panel {
        Some(path) => {
            let data = run.read(path)?;
            timeseries::read_panel_csv(Cursor::new(data)).at(path)
        }
        None => source_panel(run, src),
    }
}

fn ingest(run: &mut Run, a: &IngestArgs) -> Result<Outcome, CliError> {
    let stopwords = match &a.stopwords {
        Some(p) => {
            let data = run.read(p)?;
            Stopwords::parse(&utf8(p, data)?)
        }
        None => Stopwords::english(),
    };
    let data = run.read(&a.corpus)?;
    let (days, report) = corpus::ingest(Cursor::new(data), &stopwords).at(&a.corpus)?;
    if days.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no mood statements survived filtering",
            a.corpus.display()
        )));
    }
    let mut docs = Vec::new();
    corpus::write_documents(&mut docs, &days).expect("in-memory write");
    run.write("documents.jsonl", &docs)?;
    run.write("ingest_report.json", &pretty(&report))?;
    let human = format!(
        "read {} tweets, kept {} mood statements over {} days (dropped {} with links, {} without a mood phrase, {} unparseable)\n",
        report.read,
        report.filtered_in,
        days.len(),
        report.dropped_url,
        report.dropped_no_phrase,
        report.unparseable
    );
    Ok(Outcome {
        human,
        json: json!({ "days": days.len(), "report": report }),
    })
}

fn load_base(run: &mut Run, path: &Option<PathBuf>) -> Result<PomsBase, CliError> {
    match path {
        Some(p) => {
            let data = run.read(p)?;
            PomsBase::load(Cursor::new(data), &p.display().to_string()).at(p)
        }
        None => Ok(PomsBase::bundled()),
    }
}

fn build_lexicon(run: &mut Run, a: &BuildLexiconArgs) -> Result<Outcome, CliError> {
    let base = load_base(run, &a.base)?;
    let data = run.read(&a.ngrams)?;
    let ngrams =
        NgramCounts::load(Cursor::new(data), &a.ngrams.display().to_string()).at(&a.ngrams)?;
    let (lex, report) = build_gpoms_lexicon(&base, &ngrams, a.min_weight, a.max_terms)
        .context("building lexicon")?;
    let text = lex.to_json().context("serializing lexicon")?;
    run.write("gpoms.json", text.as_bytes())?;
    run.write("lexicon_report.json", &pretty(&report))?;
    let human = format!(
        "{} terms ({} base, {} expanded from {} candidates, {} truncated)\n",
        lex.len(),
        base.len(),
        report.candidates_kept,
        report.candidates_seen,
        report.truncated
    );
    Ok(Outcome {
        human,
        json: json!({ "terms": lex.len(), "report": report }),
    })
}

fn score(run: &mut Run, a: &ScoreArgs) -> Result<Outcome, CliError> {
    let data = run.read(&a.docs)?;
    let days = corpus::read_documents(Cursor::new(data)).at(&a.docs)?;
    let of = match &a.of_lexicon {
        Some(p) => {
            let data = run.read(p)?;
            OfLexicon::load(Cursor::new(data), &p.display().to_string()).at(p)?
        }
        None => OfLexicon::bundled(),
    };
    let gpoms = match &a.gpoms {
        Some(p) => {
            let data = run.read(p)?;
            GpomsLexicon::from_json(&utf8(p, data)?).at(p)?
        }
        None => GpomsLexicon::from_base(&load_base(run, &a.base)?),
    };
    let opts = ScoreOptions {
        volume_normalize: !a.raw_sums,
    };
    let (moods, report) = scoring::score_days(&days, &of, &gpoms, opts).context("scoring")?;
    let mut csv = Vec::new();
    scoring::write_mood_csv(&mut csv, &moods).expect("in-memory write");
    run.write("mood.csv", &csv)?;
    run.write("score_report.json", &pretty(&report))?;
    let human = format!(
        "scored {} days; {} without negative evidence, {} without mood matches\n",
        report.days,
        report.missing_of.len(),
        report.no_gpoms_matches.len()
    );
    Ok(Outcome {
        human,
        json: json!({ "report": report }),
    })
}

fn normalize(run: &mut Run, a: &NormalizeArgs) -> Result<Outcome, CliError> {
    if a.zscore_k == 0 {
        return Err(CliError::Usage("--zscore-k must be at least 1".into()));
    }
    let panel = panel_from(run, &a.mood, &a.prices, Some(a.zscore_k), a.causal)?;
    let mut csv = Vec::new();
    panel.write_csv(&mut csv).expect("in-memory write");
    run.write("panel.csv", &csv)?;
    Ok(Outcome {
        human: format!("{} aligned trading days\n", panel.len()),
        json: json!({ "rows": panel.len() }),
    })
}

fn granger(run: &mut Run, a: &GrangerArgs) -> Result<Outcome, CliError> {
    let lags = parse_lags(&a.lags).map_err(|e| CliError::Usage(format!("--lags: {e}")))?;
    let columns: Vec<Column> = a
        .columns
        .split(',')
        .map(|c| {
            c.parse::<Column>()
                .map_err(|e| CliError::Usage(format!("--columns: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let panel = panel_or_source(run, &a.panel, &a.source)?;
    let results: Vec<(String, Vec<_>)> = columns
        .iter()
        .map(|&c| {
            let name = c.name().to_owned();
            let rows = granger_bivariate(&panel.delta, panel.column(c), &name, &lags);
            (name, rows)
        })
        .collect();
    let table = econ_report::causality_table(&lags, &results);
    let json_cols: Vec<Value> = results
        .iter()
        .map(|(name, rows)| {
            let rows: Vec<Value> = rows
                .iter()
                .zip(&lags)
                .map(|(r, lag)| match r {
                    Ok(row) => to_value(row),
                    Err(e) => json!({ "lag": lag, "error": e.to_string() }),
                })
                .collect();
            json!({ "series": name, "rows": rows })
        })
        .collect();
    let body = json!({ "lags": lags, "n_rows": panel.len(), "columns": json_cols });
    run.write("granger.txt", table.as_bytes())?;
    run.write("granger.json", &pretty(&body))?;
    Ok(Outcome {
        human: table,
        json: body,
    })
}

fn regress(run: &mut Run, a: &RegressArgs) -> Result<Outcome, CliError> {
    let panel = panel_or_source(run, &a.panel, &a.source)?;
    let fit = econometrics::regress_of_on_gpoms(&panel).context("regression")?;
    let table = econ_report::regression_table(&fit);
    run.write("regression.txt", table.as_bytes())?;
    run.write("regression.json", &pretty(&fit))?;
    Ok(Outcome {
        human: table,
        json: json!({ "fit": fit }),
    })
}

fn parse_spec(s: &str) -> Result<InputSpec, CliError> {
    s.parse::<InputSpec>()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn train(run: &mut Run, a: &TrainArgs) -> Result<Outcome, CliError> {
    let spec = parse_spec(&a.spec)?;
    let mut params = a.sofnn.params()?;
    let panel = source_panel(run, &a.source)?;
    let split = forecast::split_row(&panel, a.split_date).context("split")?;
    let data = forecast::build_dataset(&panel, &spec, split).context(&spec.name)?;
    if params.k_d.len() == 1 {
        params.k_d = vec![params.k_d[0]; spec.features()];
    }
    let (model, log) = sofnn::train(&data.train, &params, a.sofnn.options()).context(&spec.name)?;
    let mut model_json = Vec::new();
    model.save(&mut model_json).context("saving model")?;
    model_json.push(b'\n');
    run.write("model.json", &model_json)?;
    let summary = json!({
        "spec": spec,
        "split_date": panel.dates[split],
        "n_train": data.train.len(),
        "neurons": model.neuron_count(),
        "final_rmse": log.final_rmse,
        "reached_target": log.reached_target,
        "additions": log.additions(),
        "pruned": log.pruned,
    });
    let train_log = json!({
        "summary": summary,
        "index_range": data.index_range,
        "column_ranges": data.column_ranges,
        "log": log,
    });
    run.write("train_log.json", &pretty(&train_log))?;
    let human = format!(
        "{}: {} training samples, {} neurons, training RMSE {:.4} ({})\n",
        spec.name,
        data.train.len(),
        model.neuron_count(),
        log.final_rmse,
        if log.reached_target {
            "target met"
        } else {
            "target not met"
        }
    );
    Ok(Outcome {
        human,
        json: summary,
    })
}

fn evaluate(run: &mut Run, a: &EvaluateArgs) -> Result<Outcome, CliError> {
    let specs: Vec<InputSpec> = match &a.specs {
        Some(list) => list.split(',').map(parse_spec).collect::<Result<_, _>>()?,
        None => InputSpec::all(),
    };
    let params = a.sofnn.params()?;
    let panel = source_panel(run, &a.source)?;
    let opts = ExperimentOptions {
        train: a.sofnn.options(),
        rolling: a.rolling,
    };
    let exp = forecast::run_experiment(&panel, &specs, &params, a.split_date, a.n_periods, opts)
        .context("evaluation")?;
    let table = forecast::render_experiment(&exp);
    run.write("evaluation.txt", table.as_bytes())?;
    run.write("evaluation.json", &pretty(&exp))?;
    Ok(Outcome {
        human: table,
        json: json!({ "experiment": exp }),
    })
}

fn synth(run: &mut Run, a: &SynthArgs, seed: u64) -> Result<Outcome, CliError> {
    let cfg = GenConfig {
        seed,
        start: a.start,
        n_days: a.days,
        tweets_per_day: a.tweets_per_day,
        coupling: Coupling {
            dimension: parse_dimension(&a.dimension)?,
            lag: a.lag,
            strength: a.strength.unwrap_or(3.0 * a.noise),
        },
        noise_std: a.noise,
        start_close: a.start_close,
    };
    cfg.validate().context("--days/--lag/--noise")?;
    let base = PomsBase::bundled();
    let of = OfLexicon::bundled();
    let (tweets, latent) =
        synthgen::generate_corpus(&cfg, &base, &of).context("generating corpus")?;
    let prices = synthgen::generate_prices(&cfg, &latent).context("generating prices")?;
    let ngrams = synthgen::generate_ngrams(&cfg, &base);
    let mut buf = Vec::new();
    synthgen::write_corpus(&mut buf, &tweets).expect("in-memory write");
    run.write("tweets.tsv", &buf)?;
    buf.clear();
    latent.write_csv(&mut buf).expect("in-memory write");
    run.write("latent.csv", &buf)?;
    buf.clear();
    timeseries::write_price_csv(&mut buf, &prices).expect("in-memory write");
    run.write("prices.csv", &buf)?;
    run.write("ngrams.tsv", ngrams.to_tsv().as_bytes())?;
    run.write("poms_base.tsv", base.to_tsv().as_bytes())?;
    run.write("of_lexicon.tsv", of.to_tsv().as_bytes())?;
    let human = format!(
        "{} tweets over {} days, {} trading rows; {} drives the index at lag {} with strength {}\n",
        tweets.len(),
        cfg.n_days,
        prices.len(),
        cfg.coupling.dimension,
        cfg.coupling.lag,
        cfg.coupling.strength
    );
    Ok(Outcome {
        human,
        json: json!({ "config": cfg, "tweets": tweets.len(), "trading_rows": prices.len() }),
    })
}

fn standardized(values: &[f64]) -> Vec<f64> {
    let (m, s) = mean_std(values);
    if s < timeseries::ZERO_STD {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - m) / s).collect()
}

fn report(run: &mut Run, a: &ReportArgs) -> Result<Outcome, CliError> {
    let dim = parse_dimension(&a.dimension)?;
    let panel = panel_from(run, &a.mood, &a.prices, a.zscore_k, a.causal)?;
    let mood_panels: Vec<(String, Vec<Series>)> = Column::MOODS
        .iter()
        .map(|&c| {
            (
                c.name().to_owned(),
                vec![Series {
                    name: c.name(),
                    values: panel.column(c).to_vec(),
                }],
            )
        })
        .collect();
    let tracking = stacked_chart("Daily mood series", &panel.dates, &mood_panels);
    let mood = standardized(panel.column(Column::Mood(dim)));
    let shifted: Vec<f64> = (0..panel.len())
        .map(|t| {
            if t >= a.lag {
                mood[t - a.lag]
            } else {
                f64::NAN
            }
        })
        .collect();
    let label = format!("{} lagged {} rows", dim, a.lag);
    let overlay = stacked_chart(
        &format!("Index delta against {label} (standardized)"),
        &panel.dates,
        &[(
            String::new(),
            vec![
                Series {
                    name: "D",
                    values: standardized(&panel.delta),
                },
                Series {
                    name: &label,
                    values: shifted,
                },
            ],
        )],
    );
    run.write("mood_tracking.svg", tracking.as_bytes())?;
    run.write("calm_vs_delta.svg", overlay.as_bytes())?;
    Ok(Outcome {
        human: format!("wrote 2 charts over {} trading days\n", panel.len()),
        json: json!({ "rows": panel.len() }),
    })
}
