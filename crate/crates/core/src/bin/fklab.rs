use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fklab::experiment::{self, ExperimentConfig, ExperimentKind};
use fklab::Error;

#[derive(Parser)]
#[command(name = "fklab", version, about = "Random-cluster model dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact-enumeration self checks.
    Validate(Common),
    /// Run the experiment named in the config file.
    Run(Common),
    /// Exact samples by coupling from the past.
    Sample(Common),
    /// Bridge counts over the middle line.
    Bridges(Common),
    /// Disjoint crossing clusters of the middle band.
    Psi(Common),
    /// Crossing frequencies.
    Crossing(Common),
    /// Coupling-time curve of the extremal pair.
    Mix(Common),
    /// Censored against systematic block dynamics.
    Block(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment description.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(common: &Common, preset: Option<ExperimentKind>) -> Result<ExperimentConfig, Error> {
    let mut config = match (&common.config, preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => return Err(Error::Config("run needs --config".into())),
    };
    if let Some(kind) = preset {
        config.experiment = kind;
    }
    if let Some(seed) = common.seed {
        config.seed = Some(seed);
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, preset) = match &cli.command {
        Command::Validate(c) => (c, Some(ExperimentKind::Validate)),
        Command::Run(c) => (c, None),
        Command::Sample(c) => (c, Some(ExperimentKind::Sample)),
        Command::Bridges(c) => (c, Some(ExperimentKind::Bridges)),
        Command::Psi(c) => (c, Some(ExperimentKind::Psi)),
        Command::Crossing(c) => (c, Some(ExperimentKind::Crossing)),
        Command::Mix(c) => (c, Some(ExperimentKind::Mix)),
        Command::Block(c) => (c, Some(ExperimentKind::Block)),
    };
    let plan = match load(common, preset).and_then(|c| c.resolve()) {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match experiment::run(&plan) {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::SizeGuard { .. })) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    match report.write(&common.out) {
        Ok((csv, json)) => {
            if plan.experiment == ExperimentKind::Validate {
                println!("{}", serde_json::to_string_pretty(&report.summary).unwrap_or_default());
            }
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("validation failed: {}", report.summary["first_failure"].as_str().unwrap_or("unknown check"));
        ExitCode::from(EXIT_FAILED)
    }
}
