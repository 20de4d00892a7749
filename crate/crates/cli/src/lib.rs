//! The `cbrw` command-line tool.
//!
//! Exit codes: 0 on success, 1 on a runtime or data error (including a
//! batch run where some images failed), 2 on a usage error.

pub mod batch;
pub mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cbrw_core::io::ReportFormat;
use cbrw_core::{Method, DEFAULT_OFFSET_BOUND};

#[derive(Debug, Parser)]
#[command(
    name = "cbrw",
    version,
    about = "Cancelable biometric templates via random-walk pixel transformation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random offset key
    Keygen(KeygenArgs),
    /// Produce the cancelable template of an image
    Enroll(EnrollArgs),
    /// Compare an original image with a template
    Evaluate(EvaluateArgs),
    /// Enroll and evaluate every image in a directory
    Batch(BatchArgs),
    /// Compare two templates of one image issued under different keys
    Diversity(DiversityArgs),
    /// Export per-channel intensity histograms
    Histogram(HistogramArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Xor,
    Cmp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Xor => Method::BitXor,
            MethodArg::Cmp => Method::BitCmp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

fn channel_count(s: &str) -> Result<usize, String> {
    match s {
        "1" => Ok(1),
        "3" => Ok(3),
        _ => Err(format!("channels must be 1 or 3, got {s}")),
    }
}

fn bound_parser() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(1..=i64::from(i32::MAX))
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "like")]
    pub width: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), required_unless_present = "like")]
    pub height: Option<u32>,
    #[arg(long, value_parser = channel_count, default_value = "1", conflicts_with = "like")]
    pub channels: usize,
    /// Take width, height and channel count from this image
    #[arg(long, conflicts_with_all = ["width", "height"])]
    pub like: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    /// Offsets are drawn uniformly from [-bound, bound]
    #[arg(long, value_parser = bound_parser(), default_value_t = DEFAULT_OFFSET_BOUND)]
    pub bound: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnrollArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub template: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long)]
    pub input_dir: PathBuf,
    /// Glob matched against file names in the input directory
    #[arg(long, default_value = "*.p[gp]m")]
    pub pattern: String,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Base seed; each image's key seed is derived from it and the file name
    #[arg(long)]
    pub seed: u64,
    /// Use the base seed unchanged for every image
    #[arg(long)]
    pub single_key: bool,
    #[arg(long, value_parser = bound_parser(), default_value_t = DEFAULT_OFFSET_BOUND)]
    pub bound: u32,
    /// Directory receiving the templates
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Also write each image's key next to its template
    #[arg(long)]
    pub save_keys: bool,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub seed_a: u64,
    #[arg(long)]
    pub seed_b: u64,
    #[arg(long, value_parser = bound_parser(), default_value_t = DEFAULT_OFFSET_BOUND)]
    pub bound: u32,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Print how the peak bin of this template compares with the image's
    #[arg(long)]
    pub template: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Keygen(args) => commands::keygen(&args),
        Command::Enroll(args) => commands::enroll(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Batch(args) => return batch::run(&args),
        Command::Diversity(args) => commands::diversity(&args),
        Command::Histogram(args) => commands::histogram(&args),
    }
    .map(|()| ExitCode::SUCCESS)
}
