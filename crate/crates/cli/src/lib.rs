//! Command-line front end: `run`, `sweep`, `attack-eval` and `verify-golden`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

mod error;
pub mod execute;
pub mod spec;

pub use error::CliError;
pub use execute::{execute, verify_golden_file};
pub use spec::{parse_config, Command, ExperimentSpec, Overrides, ReportFormat};

#[derive(Debug, Parser)]
#[command(name = "sqkd", version, about = "Semiquantum key distribution simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Repeat one configuration over seeded trials.
    Run(ExperimentArgs),
    /// Efficiency sweep over `sweep.param`/`sweep.values`.
    Sweep(ExperimentArgs),
    /// Error rates, aborts and Eve's gain across an attack parameter grid.
    AttackEval(ExperimentArgs),
    /// Recompute privacy-amplification golden vectors.
    VerifyGolden {
        /// Golden file; the bundled vectors when omitted.
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// key=value file, or JSON when the name ends in .json.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; beats SQKD_SEED and the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
}

fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads and validates the configuration named by `args`.
pub fn load_spec(
    command: Command,
    args: &ExperimentArgs,
    env_seed: Option<String>,
) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", args.config.display())))?;
    let raw = parse_config(&text, is_json_path(&args.config))?;
    let overrides = Overrides {
        seed: args.seed,
        env_seed,
        trials: args.trials,
        workers: args.workers,
        out: args.out.clone(),
        format: args
            .format
            .as_deref()
            .map(|f| f.parse().map_err(|e: String| CliError::config("format", e)))
            .transpose()?,
    };
    ExperimentSpec::from_raw(command, &raw, &overrides)
}

/// Executes a parsed command line and returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    let env_seed = std::env::var("SQKD_SEED").ok();
    let result = match &cli.command {
        CliCommand::VerifyGolden { file } => verify_golden_file(file.as_deref()).map(|n| {
            println!("verified {n} golden vectors");
        }),
        CliCommand::Run(args) => load_spec(Command::Run, args, env_seed).and_then(|s| execute(&s)),
        CliCommand::Sweep(args) => load_spec(Command::Sweep, args, env_seed).and_then(|s| execute(&s)),
        CliCommand::AttackEval(args) => load_spec(Command::AttackEval, args, env_seed).and_then(|s| execute(&s)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_line());
            e.exit_code()
        }
    }
}
