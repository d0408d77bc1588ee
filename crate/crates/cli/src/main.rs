mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::Failure;
use crate::config::{Cli, ExperimentConfig};
use crate::report::{input_hash, write_artifacts, Report};

const THREADS_VAR: &str = "BOLAB_THREADS";

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_VAR} must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn invalid(msg: &str) -> ExitCode {
    eprintln!("bolab: invalid configuration: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        return invalid(&e);
    }
    let file = match &cli.config {
        Some(p) => match ExperimentConfig::from_file(p) {
            Ok(c) => c,
            Err(e) => return invalid(&e),
        },
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig::from_cli(&cli);
    let command = flags.command.expect("subcommand sets the command");
    if file.command.is_some_and(|c| c != command) {
        return invalid("config file names a different command");
    }
    let config = flags.over(file).with_defaults(command);
    let prepared = match commands::prepare(command, &config) {
        Ok(p) => p,
        Err(e) => return invalid(&e),
    };
    let hash = input_hash(&config, &prepared.inputs);
    let (report, tables) = match commands::run(&prepared) {
        Ok(out) => {
            let passed = out.invariants.iter().all(|i| i.passed);
            let r = Report {
                tool: "bolab",
                version: env!("CARGO_PKG_VERSION"),
                config: &config,
                input_hash: hash,
                passed,
                invariants: out.invariants,
                result: Some(out.result),
                error: None,
            };
            (r, out.tables)
        }
        Err(Failure(diagnostic)) => {
            let r = Report {
                tool: "bolab",
                version: env!("CARGO_PKG_VERSION"),
                config: &config,
                input_hash: hash,
                passed: false,
                invariants: Vec::new(),
                result: None,
                error: Some(diagnostic),
            };
            (r, Vec::new())
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{json}");
    if let Some(dir) = &config.output_path {
        if let Err(e) = write_artifacts(dir, &json, &tables) {
            eprintln!("bolab: cannot write artifacts to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
