//! Experiment CLI: runs a JSON-configured experiment and writes CSV.
//!
//! Exit codes: 0 success, 2 config validation error, 3 numerical failure,
//! 4 internal check failure under `--check`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use favprop_core::experiment::{run_to_csv, ExperimentConfig, ExperimentKind};
use favprop_core::Error;

#[derive(Parser)]
#[command(
    name = "favprop",
    version,
    about = "Massive MIMO interference and capacity experiments under semi-correlated Ricean fading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity-per-user CDF over random geometries (optionally with user dropping)
    Cdf(RunArgs),
    /// Average MRC spectral efficiency over an M sweep for a scenario pair
    Saturation(RunArgs),
    /// Closed-form interference terms validated against Monte-Carlo means
    Terms(RunArgs),
    /// C1-C3 favorable-propagation scaling diagnostics over an M sweep
    Scaling(RunArgs),
    /// Gram-matrix mean-square concentration diagnostics
    Gram(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Worker thread count (defaults to the number of cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Fail (exit 4) when the experiment's internal checks do not pass
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Cdf(a) => (ExperimentKind::Cdf, a),
        Command::Saturation(a) => (ExperimentKind::Saturation, a),
        Command::Terms(a) => (ExperimentKind::Terms, a),
        Command::Scaling(a) => (ExperimentKind::Scaling, a),
        Command::Gram(a) => (ExperimentKind::Gram, a),
    };
    match run(kind, args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(kind: ExperimentKind, args: &RunArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if config.experiment != kind {
        return Err(Error::Config(format!(
            "config declares experiment \"{}\" but the \"{}\" subcommand was invoked",
            config.experiment.as_str(),
            kind.as_str()
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = Some(trials);
    }
    config.validate()?;

    let run_it = || run_to_csv(&config);
    let (csv, check_ok) = match args.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(run_it)?
        }
        None => run_it()?,
    };

    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }

    if args.check && !check_ok {
        eprintln!("check failed: experiment output did not meet its internal acceptance gates");
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parameter(_) => 2,
        Error::Dimension(_) | Error::NonFinite(_) | Error::NotPsd { .. } | Error::Numerical(_) => 3,
        Error::Io(_) => 1,
    }
}
