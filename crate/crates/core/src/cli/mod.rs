//! The `ctdistill` command line: argument parsing, the individual commands,
//! run manifests and the planted-motif generator.

mod commands;
mod manifest;
mod motif;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::ctree::LabelScheme;
use crate::error::Error;
use crate::gnn::{Arch, Pool};
use crate::graph_io::FeatureEncoding;
use crate::mining::DEFAULT_MAX_ITEMSETS;

pub use manifest::hash_path;
pub use motif::{gen_motif, MOTIF_MIN_PER_CLASS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ctdistill", version, about = "Distill graph datasets into frequent computation-tree sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a TU directory or JSONL file and write canonical JSONL.
    Ingest(IngestArgs),
    /// Write the two-class planted-motif dataset.
    GenMotif(GenMotifArgs),
    /// Mine per-class frequent tree sets from the training split.
    Distill(DistillArgs),
    /// Train a GNN on full graphs or on a distilled file.
    Train(TrainCmdArgs),
    /// Report test AUC-ROC of checkpoints or of freshly trained seeds.
    Eval(EvalArgs),
    /// Computation-tree frequency histogram.
    Stats(StatsArgs),
}

fn parse_theta(s: &str) -> Result<f64, String> {
    let t: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t <= 1.0 {
        Ok(t)
    } else {
        Err(format!("{t} is outside (0, 1]"))
    }
}

fn parse_encoding(s: &str) -> Result<FeatureEncoding, String> {
    match s {
        "constant" => Ok(FeatureEncoding::Constant),
        "degree-onehot" => Ok(FeatureEncoding::DegreeOnehot),
        _ => Err("expected constant or degree-onehot".into()),
    }
}

fn parse_scheme(s: &str) -> Result<LabelScheme, String> {
    match s {
        "feature-degree" => Ok(LabelScheme::FeatureDegree),
        "feature-only" => Ok(LabelScheme::FeatureOnly),
        _ => Err("expected feature-degree or feature-only".into()),
    }
}

fn parse_arch(s: &str) -> Result<Arch, String> {
    match s {
        "gcn" => Ok(Arch::Gcn),
        "gin" => Ok(Arch::Gin),
        _ => Err("expected gcn or gin".into()),
    }
}

fn parse_pool(s: &str) -> Result<Pool, String> {
    match s {
        "sum" => Ok(Pool::Sum),
        "mean" => Ok(Pool::Mean),
        _ => Err("expected sum or mean".into()),
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args, Serialize)]
struct DataArgs {
    /// Dataset: JSONL file or TU directory.
    #[arg(long)]
    input: PathBuf,
    /// Node inputs for featureless datasets.
    #[arg(long, default_value = "constant", value_parser = parse_encoding)]
    features: FeatureEncoding,
    /// Seed of the 80/10/10 train/val/test split.
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct GenMotifArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 100)]
    n_per_class: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct DistillArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Computation-tree depth L.
    #[arg(long, value_parser = parse_positive)]
    hops: usize,
    /// Per-class frequency thresholds, comma separated.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_theta)]
    theta: Vec<f64>,
    #[arg(long)]
    output: PathBuf,
    /// Abort instead of truncating when a class yields more itemsets.
    #[arg(long, default_value_t = DEFAULT_MAX_ITEMSETS)]
    max_itemsets: usize,
    #[arg(long, default_value = "feature-degree", value_parser = parse_scheme)]
    label_scheme: LabelScheme,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Train on this distilled file instead of the training graphs.
    #[arg(long)]
    distilled: Option<PathBuf>,
    #[arg(long, default_value = "gin", value_parser = parse_arch)]
    arch: Arch,
    #[arg(long, default_value_t = 2, value_parser = parse_positive)]
    layers: usize,
    #[arg(long, default_value_t = 64, value_parser = parse_positive)]
    hidden: usize,
    #[arg(long, default_value = "sum", value_parser = parse_pool)]
    pool: Pool,
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 32, value_parser = parse_positive)]
    batch_size: usize,
    #[arg(long, default_value_t = 15)]
    patience: usize,
    #[arg(long, default_value_t = 1e-4)]
    lr: f64,
}

#[derive(Debug, Args, Serialize)]
struct TrainCmdArgs {
    #[command(flatten)]
    train: TrainArgs,
    /// Where to write the trained model (JSON).
    #[arg(long)]
    checkpoint: PathBuf,
    /// Per-epoch CSV: epoch, train_loss, val_loss, val_auc.
    #[arg(long)]
    history: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group = clap::ArgGroup::new("models").required(true).args(["checkpoint", "seeds"]))]
struct EvalArgs {
    #[command(flatten)]
    train: TrainArgs,
    /// Evaluate these checkpoints (repeatable).
    #[arg(long)]
    checkpoint: Vec<PathBuf>,
    /// Train this many models (seeds seed, seed+1, ...) and evaluate each.
    #[arg(long, value_parser = parse_positive, conflicts_with = "checkpoint")]
    seeds: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_positive)]
    hops: usize,
    #[arg(long, default_value = "feature-degree", value_parser = parse_scheme)]
    label_scheme: LabelScheme,
    /// Histogram CSV: normalized_frequency, percent_of_trees.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) => EXIT_USAGE,
        Error::Config(_)
        | Error::Degenerate(_)
        | Error::Depth { .. }
        | Error::Shape(_)
        | Error::CapExceeded { .. }
        | Error::Version { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn report_error(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{line}");
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    let text = e.to_string();
                    let msg: Vec<&str> = text
                        .lines()
                        .take_while(|l| !l.starts_with("Usage:"))
                        .map(str::trim)
                        .filter(|l| !l.is_empty())
                        .collect();
                    report_error("UsageError", msg.join(" ").trim_start_matches("error: "));
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(&a, &argv),
        Command::GenMotif(a) => commands::gen_motif_cmd(&a, &argv),
        Command::Distill(a) => commands::distill_cmd(&a, &argv),
        Command::Train(a) => commands::train_cmd(&a, &argv),
        Command::Eval(a) => commands::eval_cmd(&a, &argv),
        Command::Stats(a) => commands::stats_cmd(&a, &argv),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            exit_code(&e)
        }
    }
}
