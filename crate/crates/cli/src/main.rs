use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use ermakov_cli::config::{output_dir, ExperimentConfig};
use ermakov_cli::output::write_json;
use ermakov_cli::validate::{validate, Mutation, ValidateOptions};
use ermakov_cli::{exit_code, run, sweep, with_jobs, ConfigError, ValidationFailed};

#[derive(Parser)]
#[command(name = "ermakov", version, about = "Time-dependent oscillator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Experiment description (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps, figures and validation.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Integrator relative tolerance, overriding the config.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
    /// Integrator absolute tolerance, overriding the config.
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one protocol and write its trajectory.
    Run,
    /// Run the cartesian product of the config's sweep axes.
    Sweep,
    /// Run the validation suite and print a JSON verdict.
    Validate {
        /// Corrupt a constant to check that the suite detects it.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
    },
    /// Write the data behind figures 1 to 4.
    Figures,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MutationArg {
    FullRampCoefficient,
}

fn load(global: &Global) -> anyhow::Result<ExperimentConfig> {
    let path = global.config.as_deref().ok_or_else(|| ConfigError::Invalid { field: "--config".into(), message: "required".into() })?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(rel) = global.tol_rel {
        cfg.integrator.rel = rel;
    }
    if let Some(abs) = global.tol_abs {
        cfg.integrator.abs = abs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    let out = output_dir(g.out.as_deref());
    match cli.command {
        Command::Run => {
            let cfg = load(g)?;
            let report = run(&cfg, &out)?;
            println!("{}", serde_json::to_string_pretty(&report.summary)?);
        }
        Command::Sweep => {
            let cfg = load(g)?;
            let report = with_jobs(g.jobs, || sweep(&cfg, &out))??;
            println!("points: {}", report.points.len());
            if let Some(slope) = report.fitted_slope {
                println!("fitted log-log slope of excess energy: {slope}");
            }
        }
        Command::Validate { mutate } => {
            let mut opts = ValidateOptions {
                mutation: mutate.map(|MutationArg::FullRampCoefficient| Mutation::FullRampCoefficient),
                ..ValidateOptions::default()
            };
            if let Some(rel) = g.tol_rel {
                opts.tolerances.rel = rel;
            }
            if let Some(abs) = g.tol_abs {
                opts.tolerances.abs = abs;
            }
            let report = with_jobs(g.jobs, || validate(&opts))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if g.out.is_some() {
                write_json(&out, "validation.json", &report)?;
            }
            if !report.passed {
                return Err(ValidationFailed { failed: report.failed() }.into());
            }
        }
        Command::Figures => {
            with_jobs(g.jobs, || ermakov_cli::figures::figures(&out))?.with_context(|| format!("writing figures to {}", display(&out)))?;
        }
    }
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
