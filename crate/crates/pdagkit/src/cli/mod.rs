//! Command-line front end. Exit codes: 0 success, 1 runtime failure,
//! 2 usage or parse error.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{BackendKind, EngineSection, EvalSection, FileConfig, GenerateSection};

use crate::dataset::{DatasetError, Style};
use crate::engine::{FilterMode, StatementSelection};
use crate::harness::{BackendError, HarnessError, Mode};
use crate::hypothesis::{EvalMode, HypothesisKind};
use crate::premise::PremiseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) | CliError::Parse(_) => 2,
        }
    }
}

impl From<PremiseError> for CliError {
    fn from(e: PremiseError) -> Self {
        match e {
            PremiseError::BankTooSmall { .. }
            | PremiseError::UnknownTheme(_)
            | PremiseError::BadThemeName(_) => CliError::Usage(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::NodeCount { .. } | DatasetError::Capacity { .. } => {
                CliError::Usage(e.to_string())
            }
            DatasetError::Premise(p) => p.into(),
            DatasetError::Record { .. } | DatasetError::Json(_) => CliError::Parse(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::NothingToScore
            | HarnessError::UnknownGroup(_)
            | HarnessError::UnknownMode(_)
            | HarnessError::Backend(BackendError::Config(_)) => CliError::Usage(e.to_string()),
            HarnessError::Record { .. } => CliError::Parse(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        HarnessError::from(e).into()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pdagkit", version, about = "Causal reasoning over verbalized statistical premises")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Repeat for more log output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled premise/hypothesis dataset.
    Generate(GenerateArgs),
    /// Parse a premise and report relations or diagnostics.
    Parse(ParseArgs),
    /// Run the symbolic procedure on a premise and answer a hypothesis.
    Solve(SolveArgs),
    /// Label hypotheses against their Markov equivalence class.
    Label(LabelArgs),
    /// Evaluate a chat backend on a dataset.
    Eval(EvalArgs),
    /// Recompute metrics from stored evaluation records.
    Score(ScoreArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Which candidate pairs mark a collider.
    #[arg(long, value_parser = parse_filter)]
    pub filter: Option<FilterMode>,
    /// Propagate orientations after collider orientation.
    #[arg(long, conflicts_with = "no_propagate")]
    pub propagate: bool,
    #[arg(long)]
    pub no_propagate: bool,
}

fn parse_filter(s: &str) -> Result<FilterMode, String> {
    s.parse().map_err(|e: crate::engine::EngineError| e.to_string())
}

fn parse_selection(s: &str) -> Result<StatementSelection, String> {
    match s {
        "minimal" => Ok(StatementSelection::Minimal),
        "full-closure" => Ok(StatementSelection::FullClosure),
        other => Err(format!("unknown selection `{other}` (expected minimal or full-closure)")),
    }
}

fn parse_kind(s: &str) -> Result<HypothesisKind, String> {
    s.parse().map_err(|e: crate::hypothesis::HypothesisError| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_eval_mode(s: &str) -> Result<EvalMode, String> {
    s.parse().map_err(|e: crate::hypothesis::HypothesisError| e.to_string())
}

fn parse_style(s: &str) -> Result<Style, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Variable counts, e.g. `--n 3` or `--n 3,4,5`.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Write records (JSON lines) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub gzip: bool,
    /// `symbolic` or `story`.
    #[arg(long, value_parser = parse_style)]
    pub style: Option<Style>,
    /// Built-in name bank for story style.
    #[arg(long, conflicts_with = "theme_file")]
    pub theme: Option<String>,
    /// Custom name bank, one name per line.
    #[arg(long)]
    pub theme_file: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Draw this many Yes and this many No samples per variable count.
    #[arg(long)]
    pub per_cell: Option<usize>,
    /// Largest conditioning set verbalized.
    #[arg(long)]
    pub max_cond: Option<usize>,
    #[arg(long, value_parser = parse_selection)]
    pub selection: Option<StatementSelection>,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub kinds: Option<Vec<HypothesisKind>>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("input").args(["premise", "premise_file", "fixture"])))]
pub struct PremiseInput {
    /// Premise text; read from stdin when no input flag is given.
    #[arg(long)]
    pub premise: Option<String>,
    #[arg(long)]
    pub premise_file: Option<PathBuf>,
    /// Pre-parsed premise in label-keyed JSON.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub hypothesis: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub input: PremiseInput,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: PremiseInput,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// `extension-quantified` (default) or `rule-based`.
    #[arg(long, value_parser = parse_eval_mode)]
    pub eval_mode: Option<EvalMode>,
    /// Emit the structured step trace.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").args(["dataset", "premise", "premise_file"]).required(true)))]
pub struct LabelArgs {
    /// Re-derive every record's label from its class.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub premise: Option<String>,
    #[arg(long)]
    pub premise_file: Option<PathBuf>,
    #[arg(long, required_unless_present = "dataset")]
    pub hypothesis: Option<String>,
    #[arg(long)]
    pub max_cond: Option<usize>,
    #[arg(long, value_parser = parse_selection)]
    pub selection: Option<StatementSelection>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output directory for records, transcripts, manifest and report.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, conflicts_with = "replay")]
    pub backend: Option<BackendKind>,
    /// Serve responses from recorded transcripts.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// `step-by-step`, `few-shot` or `baseline-cot`.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// A records file or a directory of `*.jsonl` record files.
    pub records: PathBuf,
    /// Comma-separated: n_vars, kind, mode, subtask.
    #[arg(long, value_delimiter = ',', default_value = "n_vars")]
    pub group_by: Vec<String>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
