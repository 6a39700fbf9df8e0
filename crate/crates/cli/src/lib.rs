//! `wunklab`: runs the model from JSON configs and writes CSV/JSON artifacts.
//!
//! Exit codes: 0 on success, 2 for configuration problems (bad key, missing
//! file, invalid parameters), 3 for numerical failures. On exit 3 a JSON
//! diagnostic goes to stderr and to `diagnostic.json` in the output directory.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod artifacts;
mod commands;
pub mod config;
mod error;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use crate::config::RunConfig;
pub use crate::error::CliError;
use crate::artifacts::Artifacts;

#[derive(Debug, Parser)]
#[command(name = "wunklab", version, about = "New Keynesian model with wealth in the utility function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a matplotlib script that plots the CSV files.
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured scenario and write its trajectory.
    Run(Common),
    /// Solve the scenario once per value of `sweep.parameter`.
    Sweep(Common),
    /// Classify the steady state of the analysis regime.
    Classify(Common),
    /// Write both nullclines of the analysis regime.
    Nullclines(Common),
    /// Sample the vector field on `numerics.grid`.
    PhaseField(Common),
    /// Forward-guidance and spending thresholds for the scenario's shock.
    Thresholds(Common),
    /// Comparative statics at the permanent ZLB steady state.
    Statics(Common),
    /// Print the WUNK membership test.
    CheckWunk(Common),
    /// Compare the discrete one-step map with the continuous flow.
    DiscreteCheck(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Run(c)
            | Command::Sweep(c)
            | Command::Classify(c)
            | Command::Nullclines(c)
            | Command::PhaseField(c)
            | Command::Thresholds(c)
            | Command::Statics(c)
            | Command::CheckWunk(c)
            | Command::DiscreteCheck(c) => c,
        }
    }
}

fn execute(command: &Command, cfg: &RunConfig, out: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    match command {
        Command::Run(_) => commands::run(cfg, out),
        Command::Sweep(_) => commands::sweep(cfg, out),
        Command::Classify(_) => commands::classify_cmd(cfg, out),
        Command::Nullclines(_) => commands::nullclines_cmd(cfg, out),
        Command::PhaseField(_) => commands::phase_field_cmd(cfg, out),
        Command::Thresholds(_) => commands::thresholds(cfg, out),
        Command::Statics(_) => commands::statics(cfg, out),
        Command::CheckWunk(_) => commands::check_wunk_cmd(cfg),
        Command::DiscreteCheck(_) => commands::discrete_check(cfg, out),
    }
}

fn report_failure(err: &CliError, dir: Option<&std::path::Path>) -> i32 {
    let code = err.exit_code();
    if code == 3 {
        let diagnostic = serde_json::to_string_pretty(&err.diagnostic()).expect("json value");
        eprintln!("{diagnostic}");
        if let Some(dir) = dir {
            // Best effort: the failure itself is already reported on stderr.
            let _ = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join("diagnostic.json"), diagnostic + "\n"));
        }
    } else {
        eprintln!("error: {err}");
    }
    code
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let common = cli.command.common();
    let cfg = match RunConfig::load(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => return report_failure(&e, None),
    };
    let dir = common.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    let mut out = Artifacts::new(dir.clone(), cfg.output.clone(), common.emit_plot_script);
    let result = execute(&cli.command, &cfg, &mut out).and_then(|summary| out.finish().map(|_| summary));
    match result {
        Ok(summary) => {
            // A closed pipe (e.g. `| head`) is not a failure of the run.
            let _ = writeln!(
                std::io::stdout(),
                "{}",
                serde_json::to_string_pretty(&summary).expect("json value")
            );
            0
        }
        Err(e) => report_failure(&e, Some(&dir)),
    }
}
