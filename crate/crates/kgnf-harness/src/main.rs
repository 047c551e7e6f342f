use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kgnf_harness::{run_experiment, ExperimentConfig, HarnessError, EXPERIMENTS};

/// Runs one experiment of the Klein-Gordon normal-form toolkit and writes its
/// CSV output and manifest to `<out>/<experiment>/`.
#[derive(Debug, Parser)]
#[command(name = "kgnf", version)]
struct Cli {
    /// One of: simulate, decay_report, log_phase, quad_nf_residual,
    /// cubic_nf_residual, parametrix_residual, resonance_classify,
    /// psido_bounds, lp_properties.
    experiment: String,
    /// TOML config layered over its preset's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; defaults to `output.dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted `key=value` override, for example `solver.eps=0.02`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: Cli) -> Result<PathBuf, HarnessError> {
    if !EXPERIMENTS.contains(&cli.experiment.as_str()) {
        return Err(HarnessError::Config(format!(
            "unknown experiment {:?}; expected one of {EXPERIMENTS:?}",
            cli.experiment
        )));
    }
    let mut overrides = cli.overrides;
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::parse_config(path, &overrides)?,
        None => ExperimentConfig::from_toml_str("", &overrides)?,
    };
    let out = cli.out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    run_experiment(&cli.experiment, &cfg, &out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kgnf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
