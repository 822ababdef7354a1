//! `riflex <command> --config <path> [flags]`
//!
//! Exit codes: 0 success, 1 usage, 2 config, 3 data, 4 verification failed.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riflex_core::{Axis, Normalization};

#[derive(Debug, Parser)]
#[command(
    name = "riflex",
    version,
    about = "RoPE frequency analysis for length extrapolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file, or `preset:<name>` for a bundled reference config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,

    /// Print the validated config with defaults filled in, then exit.
    #[arg(long, global = true)]
    print_effective_config: bool,

    /// Write the primary output here instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Worker threads for similarity matrices (output is identical for any value).
    #[arg(long, global = true, env = "RIFLEX_THREADS", value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-component frequency, period, repeat count and motion envelope.
    Freqs(FreqsArgs),
    /// Apply extrapolation strategies and show old and new frequencies.
    Strategy(StrategyArgs),
    /// Identify the intrinsic component from a first-repetition position.
    Intrinsic(IntrinsicArgs),
    /// Encoding-level aliasing simulation per strategy.
    Simulate(SimulateArgs),
    /// Score frame sequences for repetition.
    Norepeat(NorepeatArgs),
    /// Check that the intrinsic component stays within one cycle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FreqsArgs {
    /// Restrict to one axis.
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Length for repeat counts (default: the axis training length).
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Restrict to one axis.
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Strategy to apply instead of the configured one.
    #[arg(long, visible_alias = "name", value_name = "NAME")]
    pub strategy: Option<String>,
    /// Extrapolation factor instead of the configured one.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Component index for the riflex family.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IntrinsicArgs {
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Observed first-repetition position `N`.
    #[arg(long, conflicts_with = "propose", required_unless_present = "propose")]
    pub observed_n: Option<u64>,
    /// Estimate `N` from the first encoding-level alias instead.
    #[arg(long)]
    pub propose: bool,
    /// Positions scanned by `--propose` (default: 4 times the training length).
    #[arg(long, requires = "propose")]
    pub probe_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Strategy to simulate; repeatable. Defaults to the configured one.
    #[arg(long, value_name = "NAME")]
    pub strategy: Vec<String>,
    /// Add a delta summary against the first strategy.
    #[arg(long)]
    pub compare: bool,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Intrinsic component (default: the configured one).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub positions: Option<usize>,
    #[arg(long)]
    pub alias_threshold: Option<f64>,
    #[arg(long)]
    pub min_separation: Option<usize>,
    /// Heatmap of the full-spectrum matrix; with several strategies the
    /// strategy name is appended to the file stem.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Full-spectrum matrix as CSV, named like `--svg`.
    #[arg(long, value_name = "PATH")]
    pub matrix_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    None,
    PerPixelRms,
}

impl From<NormalizeArg> for Normalization {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::None => Normalization::None,
            NormalizeArg::PerPixelRms => Normalization::PerPixelRms,
        }
    }
}

#[derive(Debug, Args)]
pub struct NorepeatArgs {
    /// Frame directory (numbered .pgm/.ppm) or .rflx file; repeatable.
    #[arg(long, required = true, value_name = "PATH")]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub expected_period: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum)]
    pub normalize: Option<NormalizeArg>,
    /// Per-video summary as CSV.
    #[arg(long, value_name = "PATH")]
    pub aggregate_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Strategy report (JSON from `strategy`) to check instead of the configured strategies.
    #[arg(long, value_name = "PATH")]
    pub thetas: Option<PathBuf>,
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Intrinsic component (default: the configured one).
    #[arg(long)]
    pub k: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
