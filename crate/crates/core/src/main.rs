use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hte_bandit::harness::{self, validate, RunConfig};
use hte_bandit::policy::Algorithm;
use hte_bandit::Error;

#[derive(Parser)]
#[command(
    name = "hte-bandit",
    version,
    about = "Contextual bandit experiments with R-loss IGW"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm over every seed of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set run.algorithm=igw`.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run several algorithms on the same environment and seeds.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated algorithm names; the first is the baseline.
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<String>,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the enumeration and invariant checks.
    Validate,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn exit_code(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) => ExitCode::from(EXIT_CONFIG),
        Error::Io(_) => ExitCode::from(EXIT_CHECK_FAILED),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = RunConfig::load(&config, &overrides)?;
            let exp = harness::run_experiment(&cfg)?;
            let triggered = exp.runs.iter().filter(|r| r.trigger_round.is_some()).count();
            println!(
                "{} on {}: {} seeds, T = {}, final regret {:.3} +/- {:.3}, safety triggered in {} runs",
                cfg.algorithm,
                cfg.environment.scenario,
                exp.runs.len(),
                cfg.environment.horizon,
                exp.curve.final_mean(),
                exp.curve.final_std(),
                triggered
            );
            println!("wrote {}", cfg.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            config,
            algos,
            overrides,
        } => {
            let base = RunConfig::load(&config, &overrides)?;
            let algorithms = algos
                .iter()
                .map(|a| a.trim().parse::<Algorithm>().map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let configs = harness::algorithm_variants(&base, &algorithms);
            let exps = harness::compare(&configs, &base.output_dir)?;
            for (name, mean, std, ratio) in harness::comparison_rows(&exps) {
                println!("{name:>12}  final regret {mean:10.3} +/- {std:8.3}  ratio {ratio:.3}");
            }
            println!("wrote {}", base.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate => {
            let report = validate::run_validation(&validate::ValidationOptions::default())?;
            for check in &report.checks {
                println!("{check}");
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
