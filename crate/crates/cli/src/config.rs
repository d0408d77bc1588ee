//! Command-line flags, the JSON config file, and the merged [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use bergman_orlicz::growth::GrowthSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "bolab", version, about = "Bergman-Orlicz numerical laboratory")]
pub struct Cli {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory receiving report.json and CSV tables.
    #[arg(long, global = true, value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a joint coarse/fine lattice and report its separation, covering, N and J.
    Lattice(LatticeArgs),
    /// Luxembourg norm of a named test function.
    Norm(NormArgs),
    /// Neumann-series atomic decomposition of a test function.
    Decompose(DecomposeArgs),
    /// Factor an atom table written by `decompose`.
    Factorize(FactorizeArgs),
    /// Run module property checks or acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandName {
    Lattice,
    Norm,
    Decompose,
    Factorize,
    Verify,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bloch,
    Orlicz,
}

fn growth_spec(s: &str) -> Result<GrowthSpec, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid growth function JSON: {e}"))
}

#[derive(Args, Debug)]
pub struct LatticeArgs {
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub truncation_radius: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    #[arg(long, value_parser = growth_spec)]
    pub phi: Option<GrowthSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// constant:c, atom:|a|,c[,e], poly:c0,c1,... or rational:{simple_pole,blaschke,pole_pair}.
    #[arg(long)]
    pub function: Option<String>,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, value_parser = growth_spec)]
    pub phi: Option<GrowthSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub truncation_radius: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FactorizeArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_parser = growth_spec)]
    pub phi: Option<GrowthSpec>,
    #[arg(long, value_parser = growth_spec)]
    pub phi1: Option<GrowthSpec>,
    #[arg(long, value_parser = growth_spec)]
    pub phi2: Option<GrowthSpec>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Atom CSV as written by `decompose`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// growth, geometry, quad, atoms, factor or all.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub resolution: Option<usize>,
}

/// Every knob of one run. Unset fields are omitted from reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<GrowthSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi1: Option<GrowthSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi2: Option<GrowthSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        ExperimentConfig { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl ExperimentConfig {
    /// Field-wise merge in which `self` wins.
    pub fn over(self, lower: ExperimentConfig) -> ExperimentConfig {
        merge_fields!(self, lower; command, phi, phi1, phi2, alpha, n, b, eta, truncation_radius, resolution,
            tol, max_iters, seed, function, mode, s, input, suite, output_path)
    }

    pub fn from_file(path: &Path) -> Result<ExperimentConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    /// The flags of the invoked subcommand as a partial config.
    pub fn from_cli(cli: &Cli) -> ExperimentConfig {
        let mut c = ExperimentConfig { output_path: cli.output.clone(), ..Default::default() };
        match &cli.command {
            Command::Lattice(a) => {
                c.command = Some(CommandName::Lattice);
                (c.eta, c.truncation_radius, c.n) = (a.eta, a.truncation_radius, a.n);
            }
            Command::Norm(a) => {
                c.command = Some(CommandName::Norm);
                (c.phi, c.alpha, c.n, c.resolution, c.function) =
                    (a.phi.clone(), a.alpha, a.n, a.resolution, a.function.clone());
            }
            Command::Decompose(a) => {
                c.command = Some(CommandName::Decompose);
                (c.function, c.phi, c.alpha, c.b, c.eta) = (a.function.clone(), a.phi.clone(), a.alpha, a.b, a.eta);
                (c.truncation_radius, c.tol, c.max_iters, c.resolution) =
                    (a.truncation_radius, a.tol, a.max_iters, a.resolution);
            }
            Command::Factorize(a) => {
                c.command = Some(CommandName::Factorize);
                (c.mode, c.phi, c.phi1, c.phi2, c.s) = (a.mode, a.phi.clone(), a.phi1.clone(), a.phi2.clone(), a.s);
                (c.input, c.alpha, c.resolution) = (a.input.clone(), a.alpha, a.resolution);
            }
            Command::Verify(a) => {
                c.command = Some(CommandName::Verify);
                (c.suite, c.seed, c.resolution) = (a.suite.clone(), a.seed, a.resolution);
            }
        }
        c
    }

    /// Fills the documented defaults for `command`.
    pub fn with_defaults(mut self, command: CommandName) -> ExperimentConfig {
        use CommandName::*;
        if command != Verify {
            self.alpha.get_or_insert(0.0);
        }
        if matches!(command, Lattice | Norm | Decompose) {
            self.n.get_or_insert(1);
        }
        if matches!(command, Lattice | Decompose) {
            self.eta.get_or_insert(0.25);
            self.truncation_radius.get_or_insert(0.9);
        }
        match command {
            Lattice => self.alpha = None,
            Norm => {
                self.resolution.get_or_insert(16);
            }
            Decompose => {
                self.b.get_or_insert(8.0);
                self.tol.get_or_insert(1e-4);
                self.max_iters.get_or_insert(40);
                self.resolution.get_or_insert(16);
            }
            Factorize => {
                self.resolution.get_or_insert(12);
            }
            Verify => {
                self.suite.get_or_insert_with(|| "all".into());
                self.seed.get_or_insert(7);
                self.resolution.get_or_insert(16);
            }
        }
        self
    }
}
