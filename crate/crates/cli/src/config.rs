use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Ladder,
    Freq,
    Verify,
    Compare,
    Cylinder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "oufreq",
    version,
    about = "Frequency functions of drift Schrödinger eigenfunctions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact ladder solution u_k as rational coefficient JSON.
    Ladder(Flags),
    /// Frequency curve of a product eigenfunction.
    Freq(Flags),
    /// Growth, sharpness, U' and monotonicity checks.
    Verify(Flags),
    /// Comparison-operator and barrier checks.
    Compare(Flags),
    /// Modified-frequency checks on the cylinder S^1 x R.
    Cylinder(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Ladder(f) => (CommandKind::Ladder, f),
            Command::Freq(f) => (CommandKind::Freq, f),
            Command::Verify(f) => (CommandKind::Verify, f),
            Command::Compare(f) => (CommandKind::Compare, f),
            Command::Cylinder(f) => (CommandKind::Cylinder, f),
        }
    }
}

/// Every setting is optional so a config file can fill the gaps.
#[derive(Clone, Debug, Default, PartialEq, clap::Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated ladder levels, one per coordinate.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub levels: Option<Vec<i64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub r_step: Option<f64>,
    /// Gauss nodes per radial panel.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Restrict a check command to one suite.
    #[arg(long)]
    pub suite: Option<String>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Values set here win over `base`.
    pub fn over(self, base: Flags) -> Flags {
        Flags {
            n: self.n.or(base.n),
            levels: self.levels.or(base.levels),
            k: self.k.or(base.k),
            eps: self.eps.or(base.eps),
            delta: self.delta.or(base.delta),
            lambda: self.lambda.or(base.lambda),
            r_min: self.r_min.or(base.r_min),
            r_max: self.r_max.or(base.r_max),
            r_step: self.r_step.or(base.r_step),
            nodes: self.nodes.or(base.nodes),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            suite: self.suite.or(base.suite),
            config: None,
        }
    }
}

/// A fully resolved run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: usize,
    pub levels: Vec<i64>,
    pub k: i64,
    pub eps: f64,
    pub delta: f64,
    pub lambda: Option<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub nodes: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub suite: Option<String>,
}

fn read_config_file(path: &Path) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: CommandKind, flags: Flags) -> Result<Self, CliError> {
        let base = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => Flags::default(),
        };
        let f = flags.over(base);
        let n = f.n.unwrap_or_else(|| f.levels.as_ref().map_or(1, Vec::len));
        let cfg = RunConfig {
            command,
            n,
            levels: f.levels.unwrap_or_else(|| vec![0; n]),
            k: f.k.unwrap_or(0),
            eps: f.eps.unwrap_or(0.1),
            delta: f.delta.unwrap_or(0.1),
            lambda: f.lambda,
            r_min: f.r_min.unwrap_or(1.0),
            r_max: f.r_max.unwrap_or(20.0),
            r_step: f.r_step.unwrap_or(0.5),
            nodes: f.nodes,
            out: f.out,
            format: f.format,
            suite: f.suite,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(1..=3).contains(&self.n) {
            return bad(format!("n must be 1, 2 or 3, got {}", self.n));
        }
        if !(self.r_min > 0.0) || !(self.r_step > 0.0) || !(self.r_max >= self.r_min) {
            return bad(format!(
                "need r_min > 0, r_step > 0, r_max ≥ r_min; got {}, {}, {}",
                self.r_min, self.r_step, self.r_max
            ));
        }
        if !self.r_max.is_finite() || (self.r_max - self.r_min) / self.r_step > 1e6 {
            return bad("radius grid too large".into());
        }
        if matches!(self.command, CommandKind::Freq | CommandKind::Verify)
            && self.levels.len() != self.n
        {
            return bad(format!(
                "{} levels given for n = {}",
                self.levels.len(),
                self.n
            ));
        }
        if !(self.eps > 0.0) || !(self.delta > 0.0) {
            return bad(format!(
                "need eps > 0 and delta > 0; got {} and {}",
                self.eps, self.delta
            ));
        }
        if self.nodes == Some(0) {
            return bad("nodes must be positive".into());
        }
        if self.command == CommandKind::Ladder && self.format == Some(Format::Csv) {
            return bad("ladder output is JSON only".into());
        }
        Ok(())
    }
}
