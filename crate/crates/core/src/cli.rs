//! Command-line surface: dataset construction, training, evaluation,
//! prediction, encoding and parameter counting.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::checkpoint::Checkpoint;
use crate::data::{
    build_symbol_table, read_labeled, read_raw_posts, select_oov_testsets, split_dataset, write_atomic, write_labeled,
    CleanedPost, EncodedDataset, LabelSet, Preprocessor, RawFormat, RejectionCounts, DEFAULT_MAX_COUNT,
    DEFAULT_MIN_COUNT, DEFAULT_VOCAB_SIZE,
};
use crate::error::{Error, Result};
use crate::eval::{self, rank};
use crate::layers::{ModelKind, SymbolTable, WordVocab, RESERVED};
use crate::model::{count_params, embedding_rows, CountMode, ModelDims, Tweet2Vec};
use crate::optimizer::{self, EpochRecord, TrainConfig};

#[derive(Debug, Parser)]
#[command(name = "tweet2vec", version, about = "Character-level tweet encoder trained by hashtag prediction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean raw posts, filter hashtags and write train/validation/test files.
    MakeDataset(MakeDatasetArgs),
    /// Train a model and write checkpoints, the epoch log and the tables.
    Train(RunConfig),
    /// Score a labeled file with a checkpoint.
    Evaluate(EvaluateArgs),
    /// Print the top hashtags for each input line.
    Predict(PredictArgs),
    /// Print the post embedding of each input line.
    Encode(EncodeArgs),
    /// Print the closed-form parameter count.
    CountParams(CountParamsArgs),
}

fn parse_kind(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<CountMode, String> {
    match s {
        "actual" => Ok(CountMode::Actual),
        "raw" => Ok(CountMode::Raw),
        other => Err(format!("unknown count mode {other:?} (expected actual or raw)")),
    }
}

fn parse_format(s: &str) -> std::result::Result<RawFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct MakeDatasetArgs {
    /// Raw posts, one per line.
    #[arg(long)]
    pub input: PathBuf,
    /// `tsv` (language, retweet flag, text) or `plain` (text only).
    #[arg(long, default_value = "tsv", value_parser = parse_format)]
    pub format: RawFormat,
    #[arg(long, default_value = "en")]
    pub language: String,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    pub min_count: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_COUNT)]
    pub max_count: usize,
    #[arg(long)]
    pub validation_size: usize,
    #[arg(long)]
    pub test_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Word vocabulary size used to count out-of-vocabulary tokens.
    #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
    pub vocab_size: usize,
    /// Size of each OOV-stratified test subset; 0 skips them.
    #[arg(long, default_value_t = 2000)]
    pub oov_size: usize,
}

/// Everything `train` needs. Defaults are the reference hyperparameters.
#[derive(Debug, Args)]
pub struct RunConfig {
    #[arg(long, default_value = "character", value_parser = parse_kind)]
    pub model: ModelKind,
    /// Labeled training file (`tags<TAB>text`).
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub validation: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Symbol embedding size [default: 150]
    #[arg(long)]
    pub d_c: Option<usize>,
    /// GRU state size [default: 500 character, 200 word]
    #[arg(long)]
    pub d_h: Option<usize>,
    /// Post embedding size; must equal d_h [default: d_h]
    #[arg(long)]
    pub d_t: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    pub min_count: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_COUNT)]
    pub max_count: usize,
    #[command(flatten)]
    pub optim: TrainFlags,
}

#[derive(Debug, Args)]
pub struct TrainFlags {
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eta0: f64,
    #[arg(long, default_value_t = 0.9)]
    pub mu0: f64,
    #[arg(long, default_value_t = 0.001)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    pub init_sigma: f64,
    /// Validation precision@1 gain, in percentage points, below which the rate halves.
    #[arg(long, default_value_t = 0.01)]
    pub halving_threshold: f64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub halve_on_plateau: bool,
    #[arg(long, default_value_t = 5)]
    pub patience: usize,
    #[arg(long, default_value_t = 30)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub regularize_biases: bool,
}

impl TrainFlags {
    pub fn to_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            eta0: self.eta0,
            mu0: self.mu0,
            lambda: self.lambda,
            init_sigma: self.init_sigma,
            halving_threshold: self.halving_threshold,
            halve_on_plateau: self.halve_on_plateau,
            patience: self.patience,
            max_epochs: self.max_epochs,
            seed: self.seed,
            regularize_biases: self.regularize_biases,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Labeled file (`tags<TAB>text`).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
    /// Also write each example's gold tags and top-ranked tags here.
    #[arg(long)]
    pub rankings: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Posts, one per line [default: stdin]
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Posts, one per line [default: stdin]
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "\t")]
    pub delimiter: String,
    #[arg(long, default_value_t = 64)]
    pub batch_size: usize,
}

#[derive(Debug, Args)]
pub struct CountParamsArgs {
    /// Read kind, dims and table sizes from a checkpoint instead of flags.
    #[arg(long, conflicts_with_all = ["symbols", "labels"])]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value = "character", value_parser = parse_kind)]
    pub model: ModelKind,
    /// Distinct characters or vocabulary words, reserved rows excluded.
    #[arg(long, required_unless_present = "checkpoint")]
    pub symbols: Option<usize>,
    #[arg(long, required_unless_present = "checkpoint")]
    pub labels: Option<usize>,
    #[arg(long)]
    pub d_c: Option<usize>,
    #[arg(long)]
    pub d_h: Option<usize>,
    #[arg(long)]
    pub d_t: Option<usize>,
    /// `actual` counts the PAD and UNK rows; `raw` counts symbols only
    /// (plus one UNK row for the word model).
    #[arg(long, default_value = "actual", value_parser = parse_mode)]
    pub mode: CountMode,
}

/// Reference dims for a model kind: `(d_c, d_h)`.
pub fn default_dims(kind: ModelKind) -> (usize, usize) {
    match kind {
        ModelKind::Character => (150, 500),
        ModelKind::Word => (150, 200),
    }
}

fn resolve_dims(kind: ModelKind, d_c: Option<usize>, d_h: Option<usize>, d_t: Option<usize>) -> (usize, usize, usize) {
    let (dc, dh) = default_dims(kind);
    let d_h = d_h.unwrap_or(dh);
    (d_c.unwrap_or(dc), d_h, d_t.unwrap_or(d_h))
}

/// Parses arguments and runs; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match command {
        Command::MakeDataset(a) => cmd_make_dataset(&a, &mut out),
        Command::Train(c) => cmd_train(&c, &mut out),
        Command::Evaluate(a) => cmd_evaluate(&a, &mut out),
        Command::Predict(a) => {
            let input = open_input(a.input.as_deref())?;
            let skipped = cmd_predict(&Checkpoint::load(&a.checkpoint)?.model, input, a.top_k, a.batch_size, &mut out)?;
            warn_skipped(skipped);
            Ok(())
        }
        Command::Encode(a) => {
            let input = open_input(a.input.as_deref())?;
            let skipped = cmd_encode(&Checkpoint::load(&a.checkpoint)?.model, input, &a.delimiter, a.batch_size, &mut out)?;
            warn_skipped(skipped);
            Ok(())
        }
        Command::CountParams(a) => {
            let n = cmd_count_params(&a)?;
            writeln!(out, "{n}").map_err(stdout_error)
        }
    }?;
    out.flush().map_err(stdout_error)
}

fn stdout_error(e: io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn warn_skipped(n: usize) {
    if n > 0 {
        eprintln!("warning: skipped {n} empty line(s)");
    }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(fs::File::open(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Keeps only tags in `labels`; posts left without tags are dropped.
fn restrict_tags(posts: &[CleanedPost], labels: &LabelSet) -> (Vec<CleanedPost>, usize) {
    let mut kept = Vec::new();
    for p in posts {
        let hashtags: Vec<String> = p.hashtags.iter().filter(|t| labels.index_of(t).is_some()).cloned().collect();
        if !hashtags.is_empty() {
            kept.push(CleanedPost {
                text: p.text.clone(),
                hashtags,
            });
        }
    }
    let dropped = posts.len() - kept.len();
    (kept, dropped)
}

fn labels_file(labels: &LabelSet) -> String {
    let mut s = String::new();
    for (name, count) in labels.names().iter().zip(labels.counts()) {
        s.push_str(&format!("{name}\t{count}\n"));
    }
    s
}

fn symbols_file(table: &SymbolTable) -> String {
    let mut s = String::from("0\t<pad>\n1\t<unk>\n");
    match table {
        SymbolTable::Chars(a) => {
            for (i, c) in a.chars().iter().enumerate() {
                s.push_str(&format!("{}\tU+{:04X}\n", i + RESERVED, *c as u32));
            }
        }
        SymbolTable::Words(v) => {
            for (i, w) in v.words().iter().enumerate() {
                s.push_str(&format!("{}\t{w}\n", i + RESERVED));
            }
        }
    }
    s
}

fn put(out: &mut dyn Write, line: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{line}").map_err(stdout_error)
}

pub fn cmd_make_dataset(a: &MakeDatasetArgs, out: &mut dyn Write) -> Result<()> {
    let raw = read_raw_posts(&a.input, a.format, &a.language)?;
    let pre = Preprocessor::new(&a.language);
    let mut rejected = RejectionCounts::default();
    let mut cleaned = Vec::new();
    for post in &raw {
        match pre.preprocess(post) {
            Ok(c) => cleaned.push(c),
            Err(r) => rejected.record(r),
        }
    }
    let split = split_dataset(cleaned, a.validation_size, a.test_size, a.seed)?;
    let labels = LabelSet::filter(&split.train, a.min_count, a.max_count)?;
    let (train, dropped_train) = restrict_tags(&split.train, &labels);
    let (validation, dropped_validation) = restrict_tags(&split.validation, &labels);
    let (test, dropped_test) = restrict_tags(&split.test, &labels);

    create_dir(&a.out_dir)?;
    write_labeled(&a.out_dir.join("train.tsv"), &train)?;
    write_labeled(&a.out_dir.join("validation.tsv"), &validation)?;
    write_labeled(&a.out_dir.join("test.tsv"), &test)?;
    write_atomic(&a.out_dir.join("labels.txt"), labels_file(&labels).as_bytes())?;

    let mut oov_written = false;
    if a.oov_size > 0 {
        let vocab = WordVocab::build(train.iter().map(|p| p.text.as_str()), a.vocab_size).vocab;
        let (examples, _) = labels.assign(&test);
        match select_oov_testsets(&examples, &vocab, a.oov_size) {
            Ok(sel) => {
                let pick = |ids: &[usize]| ids.iter().map(|&i| test[i].clone()).collect::<Vec<_>>();
                write_labeled(&a.out_dir.join("rare_words.tsv"), &pick(&sel.rare))?;
                write_labeled(&a.out_dir.join("frequent_words.tsv"), &pick(&sel.frequent))?;
                oov_written = true;
            }
            Err(e) => eprintln!("warning: OOV test subsets not written: {e}"),
        }
    }

    put(out, format_args!("posts_read={}", raw.len()))?;
    put(out, format_args!("rejected_retweet={}", rejected.retweet))?;
    put(out, format_args!("rejected_language={}", rejected.language))?;
    put(out, format_args!("rejected_no_hashtag={}", rejected.no_hashtag))?;
    put(out, format_args!("rejected_empty={}", rejected.empty_after_clean))?;
    put(out, format_args!("labels={}", labels.len()))?;
    put(out, format_args!("train={} dropped={}", train.len(), dropped_train))?;
    put(out, format_args!("validation={} dropped={}", validation.len(), dropped_validation))?;
    put(out, format_args!("test={} dropped={}", test.len(), dropped_test))?;
    put(out, format_args!("oov_subsets={}", oov_written as u8))
}

/// Hyperparameters echoed into checkpoint headers. Paths are left out so
/// identical runs in different directories produce identical files.
pub fn config_echo(c: &RunConfig) -> Vec<(String, String)> {
    let o = &c.optim;
    [
        ("batch_size", o.batch_size.to_string()),
        ("eta0", o.eta0.to_string()),
        ("mu0", o.mu0.to_string()),
        ("lambda", o.lambda.to_string()),
        ("init_sigma", o.init_sigma.to_string()),
        ("halving_threshold", o.halving_threshold.to_string()),
        ("halve_on_plateau", o.halve_on_plateau.to_string()),
        ("patience", o.patience.to_string()),
        ("max_epochs", o.max_epochs.to_string()),
        ("regularize_biases", o.regularize_biases.to_string()),
        ("vocab_size", c.vocab_size.to_string()),
        ("min_count", c.min_count.to_string()),
        ("max_count", c.max_count.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn cmd_train(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let config = c.optim.to_config();
    config.validate()?;
    let train_posts = read_labeled(&c.train)?;
    let validation_posts = read_labeled(&c.validation)?;
    let labels = LabelSet::filter(&train_posts, c.min_count, c.max_count)?;
    let (table, short) = build_symbol_table(c.model, train_posts.iter().map(|p| p.text.as_str()), c.vocab_size);
    if short {
        eprintln!(
            "warning: training data has fewer than {} distinct words; vocabulary holds {}",
            c.vocab_size,
            table.size() - RESERVED
        );
    }
    let train_set = EncodedDataset::from_posts(&train_posts, &table, &labels)?;
    let validation_set = EncodedDataset::from_posts(&validation_posts, &table, &labels)?;
    let (d_c, d_h, d_t) = resolve_dims(c.model, c.d_c, c.d_h, c.d_t);
    let dims = ModelDims {
        table_size: table.size(),
        d_c,
        d_h,
        d_t,
        labels: labels.len(),
    };

    create_dir(&c.out_dir)?;
    write_atomic(&c.out_dir.join("symbols.txt"), symbols_file(&table).as_bytes())?;
    write_atomic(&c.out_dir.join("labels.txt"), labels_file(&labels).as_bytes())?;
    let log_path = c.out_dir.join("train.log");
    let mut log = BufWriter::new(fs::File::create(&log_path).map_err(|e| Error::io(&log_path, e))?);

    let echo = config_echo(c);
    let wrap = |params: &crate::model::ModelParams| {
        Checkpoint::new(
            Tweet2Vec {
                table: table.clone(),
                labels: labels.names().to_vec(),
                params: params.clone(),
            },
            config.seed,
            echo.clone(),
        )
    };
    let best_path = c.out_dir.join("best.ckpt");
    let outcome = optimizer::train(dims, &train_set, &validation_set, &config, |record: &EpochRecord, best| {
        writeln!(log, "{record}")
            .and_then(|_| log.flush())
            .map_err(|e| Error::io(&log_path, e))?;
        eprintln!("{record}");
        if let Some(params) = best {
            wrap(params).save(&best_path)?;
        }
        Ok(())
    })?;
    wrap(&outcome.last).save(&c.out_dir.join("final.ckpt"))?;

    let best_p1 = outcome.log.iter().map(|r| r.val_p1).fold(0.0, f64::max);
    put(out, format_args!("epochs={}", outcome.log.len()))?;
    put(out, format_args!("best_epoch={}", outcome.best_epoch))?;
    put(out, format_args!("best_val_p1={best_p1}"))?;
    put(out, format_args!("final_learning_rate={}", outcome.state.learning_rate))?;
    put(out, format_args!("train_examples={} dropped={}", train_set.len(), train_set.dropped))?;
    put(out, format_args!("validation_examples={} dropped={}", validation_set.len(), validation_set.dropped))
}

pub fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let ck = Checkpoint::load(&a.checkpoint)?;
    let labels = LabelSet::from_names(ck.model.labels.clone())?;
    let posts = read_labeled(&a.data)?;
    let data = EncodedDataset::from_posts(&posts, &ck.model.table, &labels)?;
    if data.is_empty() {
        return Err(Error::Data(format!(
            "{}: no example carries a label known to the checkpoint",
            a.data.display()
        )));
    }
    let report = eval::evaluate(&ck.model.params, &data, a.batch_size)?;
    out.write_all(report.to_record().as_bytes()).map_err(stdout_error)?;
    if let Some(path) = &a.rankings {
        let mut buf = Vec::new();
        report
            .write_rankings(&mut buf, &ck.model.labels, a.top_k)
            .map_err(|e| Error::io(path, e))?;
        write_atomic(path, &buf)?;
    }
    Ok(())
}

/// Cleans each line and scores non-empty ones in chunks of `batch_size`.
/// Returns the number of lines skipped because nothing was left to encode.
fn for_each_chunk(
    input: impl BufRead,
    batch_size: usize,
    mut f: impl FnMut(&[String]) -> Result<()>,
) -> Result<usize> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    let pre = Preprocessor::default();
    let mut skipped = 0;
    let mut chunk = Vec::with_capacity(batch_size);
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            path: "<input>".into(),
            line: n + 1,
            message: e.to_string(),
        })?;
        let text = pre.clean(&line).text;
        if text.is_empty() {
            skipped += 1;
            continue;
        }
        chunk.push(text);
        if chunk.len() == batch_size {
            f(&chunk)?;
            chunk.clear();
        }
    }
    if !chunk.is_empty() {
        f(&chunk)?;
    }
    Ok(skipped)
}

/// One line per non-empty input: `tag:posterior` pairs, best first.
pub fn cmd_predict(model: &Tweet2Vec, input: impl BufRead, top_k: usize, batch_size: usize, out: &mut dyn Write) -> Result<usize> {
    if top_k == 0 {
        return Err(Error::Config("top-k must be positive".into()));
    }
    for_each_chunk(input, batch_size, |texts| {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let p = model.posteriors(&refs)?;
        for i in 0..p.rows() {
            let ranked = rank(p.row(i));
            let line: Vec<String> = ranked
                .order
                .iter()
                .zip(&ranked.scores)
                .take(top_k)
                .map(|(&l, s)| format!("{}:{s}", model.labels[l]))
                .collect();
            put(out, line.join(" "))?;
        }
        Ok(())
    })
}

/// One delimited row of `d_t` values per non-empty input line.
pub fn cmd_encode(model: &Tweet2Vec, input: impl BufRead, delimiter: &str, batch_size: usize, out: &mut dyn Write) -> Result<usize> {
    for_each_chunk(input, batch_size, |texts| {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let e = model.embed(&refs)?;
        for i in 0..e.rows() {
            let row: Vec<String> = e.row(i).iter().map(f64::to_string).collect();
            put(out, row.join(delimiter))?;
        }
        Ok(())
    })
}

pub fn cmd_count_params(a: &CountParamsArgs) -> Result<u64> {
    let (kind, symbols, labels, d_c, d_h, d_t) = match &a.checkpoint {
        Some(path) => {
            let ck = Checkpoint::load(path)?;
            let d = ck.dims();
            (ck.model.kind(), d.table_size - RESERVED, d.labels, d.d_c, d.d_h, d.d_t)
        }
        None => {
            let (d_c, d_h, d_t) = resolve_dims(a.model, a.d_c, a.d_h, a.d_t);
            let symbols = a.symbols.ok_or_else(|| Error::Config("--symbols is required".into()))?;
            let labels = a.labels.ok_or_else(|| Error::Config("--labels is required".into()))?;
            (a.model, symbols, labels, d_c, d_h, d_t)
        }
    };
    if [d_c, d_h, d_t, labels].contains(&0) {
        return Err(Error::Config("dimensions and label count must be positive".into()));
    }
    Ok(count_params(embedding_rows(kind, symbols, a.mode), d_c, d_h, d_t, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn train_defaults_are_reference_values() {
        let cli = Cli::try_parse_from(["tweet2vec", "train", "--train", "a", "--validation", "b", "--out-dir", "c"]).unwrap();
        let Command::Train(c) = cli.command else { panic!("expected train") };
        assert_eq!(c.optim.to_config(), TrainConfig::default());
        assert_eq!((c.min_count, c.max_count, c.vocab_size), (500, 19_000, 20_000));
        assert_eq!(resolve_dims(c.model, c.d_c, c.d_h, c.d_t), (150, 500, 500));
        assert_eq!(resolve_dims(ModelKind::Word, None, None, None), (150, 200, 200));
    }

    #[test]
    fn flags_override_every_field() {
        let cli = Cli::try_parse_from([
            "tweet2vec", "train", "--train", "a", "--validation", "b", "--out-dir", "c", "--model", "word",
            "--batch-size", "8", "--eta0", "0.5", "--mu0", "0.5", "--lambda", "0", "--init-sigma", "0.2",
            "--halving-threshold", "1", "--halve-on-plateau", "false", "--patience", "9", "--max-epochs", "200",
            "--seed", "3", "--regularize-biases", "false",
        ])
        .unwrap();
        let Command::Train(c) = cli.command else { panic!("expected train") };
        assert_eq!(c.model, ModelKind::Word);
        assert_eq!(
            c.optim.to_config(),
            TrainConfig {
                batch_size: 8,
                eta0: 0.5,
                mu0: 0.5,
                lambda: 0.0,
                init_sigma: 0.2,
                halving_threshold: 1.0,
                halve_on_plateau: false,
                patience: 9,
                max_epochs: 200,
                seed: 3,
                regularize_biases: false,
            }
        );
    }

    #[test]
    fn count_params_reference_budgets() {
        let parse = |args: &[&str]| {
            let cli = Cli::try_parse_from(["tweet2vec", "count-params"].iter().chain(args)).unwrap();
            let Command::CountParams(a) = cli.command else { panic!("expected count-params") };
            cmd_count_params(&a).unwrap()
        };
        assert_eq!(parse(&["--symbols", "2829", "--labels", "2039", "--mode", "raw"]), 3_899_389);
        assert_eq!(parse(&["--model", "word", "--symbols", "20000", "--labels", "2039", "--mode", "raw"]), 3_911_389);
        assert_eq!(
            parse(&["--symbols", "2829", "--labels", "2039"]),
            3_899_389 + 2 * 150
        );
    }

    #[test]
    fn restrict_tags_drops_unlabeled() {
        let labels = LabelSet::from_names(vec!["a".into()]).unwrap();
        let posts = vec![
            CleanedPost {
                text: "x".into(),
                hashtags: vec!["b".into(), "a".into()],
            },
            CleanedPost {
                text: "y".into(),
                hashtags: vec!["b".into()],
            },
        ];
        let (kept, dropped) = restrict_tags(&posts, &labels);
        assert_eq!(dropped, 1);
        assert_eq!(kept[0].hashtags, vec!["a".to_string()]);
    }
}
