use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use threshold_core::monte_carlo::{DEFAULT_LEVEL, DEFAULT_SAMPLES};
use threshold_core::{Tolerances, DEFAULT_ENUMERATION_CAP};

use crate::error::LabError;

pub const DEFAULT_GRID_POINTS: usize = 101;
pub const DEFAULT_DIGITS: u32 = 4;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_EPSILON: f64 = 0.25;
pub const CAP_ENV: &str = "THRESHOLD_LAB_CAP";

#[derive(Debug, Parser)]
#[command(name = "threshold-lab", version, about = "Influences, lifts and threshold bounds for increasing events")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Exact analysis at one parameter value
    Analyze(Common),
    /// Exact (or sampled) sweep over a parameter grid, with threshold windows
    Sweep(Common),
    /// Dyadic lift functionals and the modified Poincare check
    Lift(Common),
    /// Threshold bound and its simplified form between t1 and t2
    Verify(Common),
    /// Monte Carlo estimates of the event probability and pivotal probabilities
    Mc(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Sweep,
    Lift,
    Verify,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Event definition (JSON)
    #[arg(long)]
    pub event: PathBuf,
    /// Measure family definition (JSON)
    #[arg(long)]
    pub family: PathBuf,
    /// Parameter value (analyze, lift, mc)
    #[arg(long)]
    pub t: Option<f64>,
    /// Lower end of the parameter range (verify; optional for sweep)
    #[arg(long)]
    pub t1: Option<f64>,
    /// Upper end of the parameter range (verify; optional for sweep)
    #[arg(long)]
    pub t2: Option<f64>,
    /// Grid size for sweeps, verification subgrids and family validation
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Binary digits per coordinate for lift
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    pub m: u32,
    /// Window levels for sweep, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    pub epsilon: Vec<f64>,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Monte Carlo seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Absolute tolerance for inequality checks
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Check this many random (t1, t2) pairs instead of all grid pairs
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Sweep by Monte Carlo instead of exact enumeration
    #[arg(long)]
    pub mc: bool,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the monotonicity check of tabulated events (mc only)
    #[arg(long)]
    pub unchecked: bool,
    /// Enumeration cap on r^n
    #[arg(long, env = CAP_ENV, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

/// Fully resolved run settings, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub event: PathBuf,
    pub family: PathBuf,
    pub t: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub grid_points: usize,
    pub m_digits: u32,
    pub epsilon: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub confidence_level: f64,
    pub tolerances: Tolerances,
    pub pairs: Option<usize>,
    pub monte_carlo_sweep: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub unchecked: bool,
    pub cap: u64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, LabError> {
        let (command, c) = match cli.command {
            CommandArgs::Analyze(c) => (Command::Analyze, c),
            CommandArgs::Sweep(c) => (Command::Sweep, c),
            CommandArgs::Lift(c) => (Command::Lift, c),
            CommandArgs::Verify(c) => (Command::Verify, c),
            CommandArgs::Mc(c) => (Command::Mc, c),
        };
        let config = Self {
            command,
            event: c.event,
            family: c.family,
            t: c.t,
            t1: c.t1,
            t2: c.t2,
            grid_points: c.grid_points,
            m_digits: c.m,
            epsilon: c.epsilon,
            samples: c.samples,
            seed: c.seed,
            confidence_level: DEFAULT_LEVEL,
            tolerances: Tolerances {
                inequality: c.tol,
                ..Tolerances::default()
            },
            pairs: c.pairs,
            monte_carlo_sweep: c.mc,
            format: c.format,
            out: c.out,
            unchecked: c.unchecked,
            cap: c.cap,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let usage = |m: &str| Err(LabError::Usage(m.into()));
        let needs_t = matches!(self.command, Command::Analyze | Command::Lift | Command::Mc);
        if needs_t && self.t.is_none() {
            return usage("--t is required for this command");
        }
        match (self.t1, self.t2) {
            (Some(a), Some(b)) if a > b => return usage("--t1 must not exceed --t2"),
            (Some(_), None) | (None, Some(_)) => return usage("--t1 and --t2 go together"),
            (None, None) if self.command == Command::Verify => return usage("verify needs --t1 and --t2"),
            _ => {}
        }
        if self.grid_points < 2 {
            return usage("--grid-points must be at least 2");
        }
        let tol = &self.tolerances;
        if [tol.inequality, tol.russo, tol.remark, tol.curve].iter().any(|v| !(*v > 0.0)) {
            return usage("tolerances must be positive");
        }
        if self.epsilon.iter().any(|e| !(*e > 0.0 && *e < 0.5)) {
            return usage("--epsilon values must lie in (0, 0.5)");
        }
        if self.unchecked && self.command != Command::Mc {
            return usage("--unchecked is only allowed with mc");
        }
        if self.monte_carlo_sweep && self.command != Command::Sweep {
            return usage("--mc only applies to sweep");
        }
        if self.m_digits == 0 {
            return usage("--m must be at least 1");
        }
        Ok(())
    }
}

/// Defaults embedded in report metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub grid_points: usize,
    pub m_digits: u32,
    pub tolerance: f64,
    pub samples: u64,
    pub epsilon: f64,
    pub confidence_level: f64,
    pub enumeration_cap: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            m_digits: DEFAULT_DIGITS,
            tolerance: DEFAULT_TOLERANCE,
            samples: DEFAULT_SAMPLES,
            epsilon: DEFAULT_EPSILON,
            confidence_level: DEFAULT_LEVEL,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}
