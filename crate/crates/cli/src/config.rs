use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use fermilearn::fermion::config::MAX_MODES;
use fermilearn::fermion::DEFAULT_CAPACITY;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Learn Haar-random (or loaded) fermion states and certify the TV bound.
    LearnFermion,
    /// Tomography of random (or loaded) density matrices.
    LearnDensity,
    /// Run every bound check over a seeded ensemble.
    Verify,
    /// Draw samples from a fermion state and write them as CSV.
    Sample,
    /// Recompute the published example probabilities.
    Fixtures,
}

/// Command-line flags, before validation.
#[derive(Debug, Clone, Parser)]
#[command(name = "fermilearn", version, about = "Learn and verify non-interacting fermion distributions")]
pub struct Args {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Number of modes.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of particles.
    #[arg(long)]
    pub n: Option<usize>,
    /// Density matrix dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Target accuracy: total variation for fermions, trace distance for densities.
    #[arg(long, conflicts_with = "gamma")]
    pub epsilon: Option<f64>,
    /// Per-entry accuracy, used directly.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs (learn modes) or ensemble size (verify).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Number of samples for the sample mode.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// JSON state file; replaces the random instance.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest outcome table or lift to enumerate.
    #[arg(long, env = "FERMILEARN_CAPACITY")]
    pub capacity: Option<u128>,
}

/// Validated run parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub delta: f64,
    pub seed: u64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip)]
    pub state_file: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub capacity: u128,
}

pub const DEFAULT_VERIFY_INSTANCES: u64 = 100;

impl ExperimentConfig {
    /// Parses and validates a command line (first item is the program name).
    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let parsed = Args::try_parse_from(args).map_err(CliError::from_clap)?;
        Self::try_from(parsed)
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::config(msg)
}

fn require<T>(value: Option<T>, flag: &str, mode: &str) -> Result<T, CliError> {
    value.ok_or_else(|| config(format!("--{flag} is required for --mode {mode}")))
}

fn check_open_unit(value: f64, flag: &str) -> Result<(), CliError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(config(format!("--{flag} must lie in (0, 1), got {value}")))
    }
}

fn check_modes(m: usize, n: usize) -> Result<(), CliError> {
    if !(2..=MAX_MODES).contains(&m) {
        return Err(config(format!("--m must lie in [2, {MAX_MODES}], got {m}")));
    }
    if n == 0 || n > m {
        return Err(config(format!("--n must lie in [1, m], got {n}")));
    }
    Ok(())
}

impl TryFrom<Args> for ExperimentConfig {
    type Error = CliError;

    fn try_from(a: Args) -> Result<Self, CliError> {
        if let Some(t) = a.trials {
            if t == 0 {
                return Err(config("--trials must be positive"));
            }
        }
        check_open_unit(a.delta, "delta")?;
        if let Some(e) = a.epsilon {
            check_open_unit(e, "epsilon")?;
        }
        if let Some(g) = a.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(config(format!("--gamma must be positive, got {g}")));
            }
        }
        let capacity = a.capacity.unwrap_or(DEFAULT_CAPACITY);
        if capacity == 0 {
            return Err(config("capacity must be positive"));
        }
        let mut cfg = ExperimentConfig {
            mode: a.mode,
            m: a.m,
            n: a.n,
            d: a.d,
            epsilon: a.epsilon,
            gamma: a.gamma,
            delta: a.delta,
            seed: a.seed,
            trials: a.trials.unwrap_or(1),
            samples: None,
            state_file: a.state_file,
            out: a.out,
            capacity,
        };
        let from_file = cfg.state_file.is_some();
        match a.mode {
            Mode::LearnFermion => {
                if !from_file {
                    let m = require(a.m, "m", "learn-fermion")?;
                    let n = require(a.n, "n", "learn-fermion")?;
                    check_modes(m, n)?;
                }
                if a.epsilon.is_none() && a.gamma.is_none() {
                    return Err(config("one of --epsilon or --gamma is required for --mode learn-fermion"));
                }
            }
            Mode::LearnDensity => {
                if !from_file {
                    let d = require(a.d, "d", "learn-density")?;
                    if !(2..=MAX_MODES).contains(&d) {
                        return Err(config(format!("--d must lie in [2, {MAX_MODES}], got {d}")));
                    }
                }
                if a.epsilon.is_none() && a.gamma.is_none() {
                    return Err(config("one of --epsilon or --gamma is required for --mode learn-density"));
                }
            }
            Mode::Verify => {
                cfg.trials = a.trials.unwrap_or(DEFAULT_VERIFY_INSTANCES);
            }
            Mode::Sample => {
                if !from_file {
                    let m = require(a.m, "m", "sample")?;
                    let n = require(a.n, "n", "sample")?;
                    check_modes(m, n)?;
                }
                if a.samples == 0 {
                    return Err(config("--samples must be positive"));
                }
                cfg.samples = Some(a.samples);
            }
            Mode::Fixtures => {}
        }
        Ok(cfg)
    }
}
