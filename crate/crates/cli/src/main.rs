use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use corrscope::RunConfig;
use corrscope_core::{AssetClass, NullKind};

/// Rolling correlation-matrix, random-matrix and PCA diagnostics for a
/// weekly price panel.
#[derive(Debug, Parser)]
#[command(name = "corrscope", version)]
struct Args {
    /// Prices CSV: `date,<ticker>,...`
    #[arg(long, value_name = "PATH")]
    prices: PathBuf,
    /// Asset metadata CSV: `ticker,asset_class`
    #[arg(long, value_name = "PATH")]
    meta: PathBuf,
    /// Window length T in returns
    #[arg(long, default_value_t = 100)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Null-model simulations
    #[arg(long, default_value_t = 10_000)]
    sims: usize,
    /// Master seed for every null model
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "shuffled", value_parser = ["shuffled", "gaussian"])]
    null: String,
    /// Deepest component reported per asset
    #[arg(long, default_value_t = 6)]
    max_rank: usize,
    /// Comma-separated asset classes to keep
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    classes: Option<Vec<AssetClass>>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Directory for cached null baselines
    #[arg(long, value_name = "PATH")]
    baseline_cache: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        prices_path: args.prices,
        meta_path: args.meta,
        window: args.window,
        step: args.step,
        sims: args.sims,
        master_seed: args.seed,
        null_kind: args.null.parse::<NullKind>().expect("restricted by clap"),
        max_rank: args.max_rank,
        classes: args.classes,
        output_dir: args.out,
        baseline_cache: args.baseline_cache,
    };
    match corrscope::pipeline::run(&config) {
        Ok(out) => {
            println!(
                "{} windows over {} assets written to {}",
                out.reports.len(),
                out.meta.len(),
                config.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
