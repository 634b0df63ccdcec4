use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use declab::scenario::{
    output_paths, parse_config, run_scenario, write_outputs, Experiment, ScenarioConfig,
    ScenarioError,
};

#[derive(Parser)]
#[command(
    name = "declab",
    version,
    about = "Run decoherence scenarios and write CSV series and JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV and report, replacing the one in the scenario.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in the scenario.
    Run(RunArgs),
    /// Parse and validate a scenario without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a scenario that must be an Araki–Zurek experiment.
    ArakiZurek(RunArgs),
    /// Run a scenario that must be a spin experiment.
    Spin(RunArgs),
    /// Run a scenario that must be a spin asymptotics experiment.
    SpinAsymptotics(RunArgs),
    /// Run a scenario that must be a decoherence function scan.
    ChiScan(RunArgs),
    /// Run a scenario that must be a decomposition demo.
    DecomposeDemo(RunArgs),
}

fn load(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let bytes = fs::read(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&bytes)
}

fn run(args: &RunArgs, expected: Option<Experiment>) -> Result<(), ScenarioError> {
    let cfg = load(&args.config)?;
    if let Some(e) = expected {
        if cfg.experiment != e {
            return Err(ScenarioError::Validation {
                key: "experiment".into(),
                msg: format!(
                    "scenario runs `{}`, subcommand expects `{}`",
                    cfg.experiment.name(),
                    e.name()
                ),
            });
        }
    }
    let output = run_scenario(&cfg)?;
    let (csv, report) = output_paths(&cfg, args.out.as_deref());
    write_outputs(&output, &csv, &report)?;
    if let Some(fit) = &output.report.fit {
        println!(
            "fit: C = {:.6e}, gamma = {:.4}, window = [{}, {}]",
            fit.c, fit.gamma, fit.window.0, fit.window.1
        );
    } else if let Some(e) = &output.report.fit_error {
        println!("fit: not available ({e})");
    }
    println!("wrote {} and {}", csv.display(), report.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a, None),
        Command::Validate { config } => {
            load(config).map(|cfg| println!("ok: {}", cfg.experiment.name()))
        }
        Command::ArakiZurek(a) => run(a, Some(Experiment::ArakiZurek)),
        Command::Spin(a) => run(a, Some(Experiment::Spin)),
        Command::SpinAsymptotics(a) => run(a, Some(Experiment::SpinAsymptotics)),
        Command::ChiScan(a) => run(a, Some(Experiment::ChiScan)),
        Command::DecomposeDemo(a) => run(a, Some(Experiment::DecomposeDemo)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("declab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
