//! `clincorp` command line.
//!
//! Exit status: 0 success, 1 findings (diagnostics, excluded sentences,
//! disagreements), 2 usage, I/O or format errors. Reports go to stdout only
//! once a command has fully succeeded.

mod commands;
mod config;
mod round;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use clincorp::agreement::RelationMode;
use clincorp::stats::StatLayer;
use clincorp::{DocType, MatchPolicy};

#[derive(Parser)]
#[command(name = "clincorp", version, about = "Multilayer clinical corpus annotation toolkit")]
struct Cli {
    /// JSON configuration file. Defaults to $CLINCORP_CONFIG when set.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum LayerArg {
    Seg,
    Pos,
    Chunk,
    Tree,
    Entity,
    Relation,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Report {
    Pos,
    Syn,
    Entity,
    Relation,
    Length,
}

impl Report {
    pub fn layer(self) -> Option<StatLayer> {
        match self {
            Report::Pos => Some(StatLayer::Pos),
            Report::Syn => Some(StatLayer::Syntactic),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(clap::Args, Clone, Debug)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub layer: LayerArg,
    /// Relation matching: group (group-preserved) or one2one.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<RelationMode>,
    #[arg(long, value_parser = parse_policy)]
    pub policy: Option<MatchPolicy>,
    /// F-measure beta.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check every document bundle in a directory.
    Validate { dir: PathBuf },
    /// Agreement between two annotation groups.
    Iaa {
        #[command(flatten)]
        args: CompareArgs,
        dir_a: PathBuf,
        dir_b: PathBuf,
    },
    /// Score predictions against gold annotations.
    Score {
        #[command(flatten)]
        args: CompareArgs,
        gold_dir: PathBuf,
        pred_dir: PathBuf,
    },
    /// Itemized disagreements between two groups, one TSV record per line.
    Diff {
        #[arg(long, value_enum)]
        layer: LayerArg,
        #[arg(long, value_enum)]
        format: Option<Format>,
        dir_a: PathBuf,
        dir_b: PathBuf,
    },
    /// Expand group relations of one `.ann` file into one-to-one relations.
    Expand { ann: PathBuf },
    /// Corpus statistics.
    Stats {
        #[arg(long, value_enum)]
        report: Report,
        #[arg(long, value_parser = parse_doc_type)]
        doc_type: Option<DocType>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        dir: PathBuf,
    },
    /// Cross-validation folds over a directory or a file of ids.
    Kfold {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        source: PathBuf,
    },
    /// Annotation round state.
    Round {
        #[command(subcommand)]
        action: round::RoundCommand,
    },
    /// Segmentation advice for a lexicon term.
    SegAdvise {
        #[arg(long)]
        lexicon: PathBuf,
        /// Rule order, e.g. R1,R2,R3,R4.
        #[arg(long)]
        order: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        term: String,
    },
}

fn parse_mode(s: &str) -> Result<RelationMode, String> {
    s.parse()
}

fn parse_policy(s: &str) -> Result<MatchPolicy, String> {
    s.parse()
}

fn parse_doc_type(s: &str) -> Result<DocType, String> {
    s.parse().map_err(|e: clincorp::model::UnknownLabel| e.to_string())
}

/// What a successful command produced.
pub struct Output {
    pub stdout: String,
    pub findings: bool,
}

impl Output {
    pub fn clean(stdout: String) -> Self {
        Output { stdout, findings: false }
    }
}

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CmdResult = Result<Output, CliError>;

fn run(cli: Cli) -> CmdResult {
    let cfg = config::Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Validate { dir } => commands::validate(&cfg, &dir),
        Command::Iaa { args, dir_a, dir_b } => commands::compare(&cfg, &args, &dir_a, &dir_b),
        Command::Score { args, gold_dir, pred_dir } => commands::compare(&cfg, &args, &gold_dir, &pred_dir),
        Command::Diff { layer, format, dir_a, dir_b } => commands::diff(&cfg, layer, format, &dir_a, &dir_b),
        Command::Expand { ann } => commands::expand(&ann),
        Command::Stats { report, doc_type, format, dir } => commands::stats(&cfg, report, doc_type, format, &dir),
        Command::Kfold { k, seed, source } => commands::kfold(&cfg, k, seed, &source),
        Command::Round { action } => round::run(&cfg, action),
        Command::SegAdvise { lexicon, order, format, term } => {
            commands::seg_advise(&cfg, &lexicon, order, format, &term)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if out.findings { 1 } else { 0 })
        }
        Err(CliError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
