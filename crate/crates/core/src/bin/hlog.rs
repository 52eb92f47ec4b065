use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use hlog::harness::{runner, Constants, Experiment, ExperimentConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Command {
    Stein,
    Zygmund,
    MeanZeroDivergence,
    Paraproduct,
    Atomic,
    Fourier,
    OrliczTransforms,
    Suite,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Stein => Experiment::Stein,
            Command::Zygmund => Experiment::Zygmund,
            Command::MeanZeroDivergence => Experiment::MeanZeroDivergence,
            Command::Paraproduct => Experiment::Paraproduct,
            Command::Atomic => Experiment::Atomic,
            Command::Fourier => Experiment::Fourier,
            Command::OrliczTransforms => Experiment::OrliczTransforms,
            Command::Suite => Experiment::Suite,
        }
    }
}

/// Runs H^log experiments and acceptance suites, writing CSV tables and JSON reports.
///
/// The constants manifest can be replaced by setting HLOG_CONSTANTS to a file path.
#[derive(Debug, Parser)]
#[command(name = "hlog", version)]
struct Cli {
    /// Experiment to run; omit when --config names one
    experiment: Option<Command>,
    /// JSON config with experiment, depth, seed, params and output_path
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment parameter, repeatable
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn config_from(cli: Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let Some(exp) = cli.experiment else {
                bail!("name an experiment or pass --config");
            };
            let Some(out) = cli.out.clone() else {
                bail!("--out is required without --config");
            };
            ExperimentConfig::new(exp.into(), out)
        }
    };
    if let Some(exp) = cli.experiment {
        config.experiment = exp.into();
    }
    if let Some(out) = cli.out {
        config.output_path = out;
    }
    if let Some(d) = cli.depth {
        config.depth = d;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    config.params.extend(cli.params);
    Ok(config)
}

fn main() -> Result<ExitCode> {
    let config = config_from(Cli::parse())?;
    let constants = Constants::load().context("loading the constants manifest")?;
    let outcome = runner::run(&config, &constants)
        .with_context(|| format!("running {}", config.experiment.name()))?;
    outcome
        .write(&config.output_path)
        .with_context(|| format!("writing to {}", config.output_path.display()))?;
    for r in &outcome.reports {
        println!("{}", r.summary_line());
        for c in r.checks.iter().filter(|c| !c.pass) {
            println!(
                "    {}: worst {} against {} ({} of {} cases)",
                c.name, c.worst, c.limit, c.violations, c.cases
            );
        }
    }
    Ok(if outcome.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
