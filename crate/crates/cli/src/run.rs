use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use fermilearn::analysis::{
    check_tv_theorem, fixture_complex_necessity, tally, total_variation, verification_suite, BoundCheckReport,
    CheckOptions, CheckTally,
};
use fermilearn::fermion::{binomial, brute_force_distribution_with, minor_distribution, sample_batch, FermionState};
use fermilearn::haar::haar_isometry;
use fermilearn::learner::{
    epsilon_to_gamma, project_to_valid_state, reconstruct_with, ReconstructionReport, SimulatedOracle,
};
use fermilearn::rng::{derive_seed, stream, Domain};
use fermilearn::tomography::{
    check_trace_bound, gamma_for_trace_epsilon, random_density, reconstruct_density, DensityMatrix, DensityOracle,
};
use fermilearn::Execution;
use serde::Serialize;

use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;

/// Version of every report and sample file layout written by this crate.
pub const FORMAT_VERSION: u32 = 1;

/// Header fields shared by every JSON report.
#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    mode: Mode,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    body: T,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    timestamp: u64,
}

#[derive(Debug, Serialize)]
pub struct FermionTrial {
    pub trial: u64,
    pub oracle_seed: u64,
    pub reconstruction: serde_json::Value,
    pub gamma_observed: f64,
    pub tv_raw: f64,
    pub tv_projected: f64,
    pub projection_tie: bool,
    pub within_epsilon: bool,
    pub theorem_check: BoundCheckReport,
}

#[derive(Debug, Serialize)]
pub struct FermionBody {
    pub m: usize,
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub trials: Vec<FermionTrial>,
    pub runs_within_epsilon: u64,
    pub theorem_satisfied_all: bool,
}

#[derive(Debug, Serialize)]
pub struct DensityTrial {
    pub trial: u64,
    pub oracle_seed: u64,
    pub reconstruction: serde_json::Value,
    pub gamma_observed: f64,
    pub trace_distance: f64,
    pub within_epsilon: bool,
    pub trace_bound_check: BoundCheckReport,
}

#[derive(Debug, Serialize)]
pub struct DensityBody {
    pub d: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub trials: Vec<DensityTrial>,
    pub runs_within_epsilon: u64,
    pub bound_satisfied_all: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyBody {
    pub instances: u64,
    pub slack: f64,
    pub reports: Vec<BoundCheckReport>,
    pub tally: BTreeMap<String, CheckTally>,
    pub all_satisfied: bool,
}

#[derive(Debug, Serialize)]
pub struct FixtureBody {
    pub reports: Vec<BoundCheckReport>,
    pub all_satisfied: bool,
}

/// What a run produced: the text of the report, and whether every
/// assertion a fixture run makes held.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub text: String,
    pub fixtures_failed: bool,
}

/// Runs `cfg` and returns the report text without writing it anywhere.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    execute_with(cfg, Execution::default())
}

pub fn execute_with(cfg: &ExperimentConfig, exec: Execution) -> Result<RunOutput, CliError> {
    let opts = CheckOptions { capacity: cfg.capacity, ..CheckOptions::default() };
    let mut fixtures_failed = false;
    let text = match cfg.mode {
        Mode::LearnFermion => envelope(cfg, learn_fermion(cfg, &opts, exec)?),
        Mode::LearnDensity => envelope(cfg, learn_density(cfg, &opts, exec)?),
        Mode::Verify => {
            let reports = verification_suite(cfg.seed, cfg.trials, &opts, exec)?;
            let t = tally(&reports);
            let body = VerifyBody {
                instances: cfg.trials,
                slack: opts.slack,
                all_satisfied: reports.iter().all(|r| r.satisfied),
                tally: t,
                reports,
            };
            envelope(cfg, body)
        }
        Mode::Fixtures => {
            let report = fixture_complex_necessity()?;
            fixtures_failed = !report.satisfied;
            envelope(cfg, FixtureBody { all_satisfied: report.satisfied, reports: vec![report] })
        }
        Mode::Sample => sample_csv(cfg)?,
    };
    Ok(RunOutput { text, fixtures_failed })
}

/// Runs `cfg` and writes the report to `cfg.out` or standard output.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let output = execute(cfg)?;
    match &cfg.out {
        Some(path) => write_atomically(path, &output.text)?,
        None => std::io::stdout().write_all(output.text.as_bytes())?,
    }
    Ok(output)
}

fn write_atomically(path: &Path, text: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn envelope<T: Serialize>(cfg: &ExperimentConfig, body: T) -> String {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let env = Envelope { format_version: FORMAT_VERSION, mode: cfg.mode, config: cfg, body, timestamp };
    let mut s = serde_json::to_string_pretty(&env).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn load_fermion(cfg: &ExperimentConfig) -> Result<Option<FermionState>, CliError> {
    match &cfg.state_file {
        None => Ok(None),
        Some(path) => Ok(Some(FermionState::from_json_str(&fs::read_to_string(path)?)?)),
    }
}

fn check_capacity(needed: u128, cfg: &ExperimentConfig) -> Result<(), CliError> {
    if needed > cfg.capacity {
        return Err(fermilearn::Error::Capacity { needed, limit: cfg.capacity }.into());
    }
    Ok(())
}

fn learn_fermion(cfg: &ExperimentConfig, opts: &CheckOptions, exec: Execution) -> Result<FermionBody, CliError> {
    let fixed = load_fermion(cfg)?;
    let (m, n) = match &fixed {
        Some(s) => (s.modes(), s.particles()),
        None => (cfg.m.expect("validated"), cfg.n.expect("validated")),
    };
    check_capacity(binomial(m, n), cfg)?;
    let gamma = match cfg.epsilon {
        Some(e) => epsilon_to_gamma(e, m, n)?,
        None => cfg.gamma.expect("validated"),
    };
    let epsilon = cfg.epsilon.unwrap_or(2.0 * n as f64 * (m as f64).sqrt() * gamma);

    let trials = exec.try_map(cfg.trials as usize, |t| {
        let t = t as u64;
        let state = match &fixed {
            Some(s) => s.clone(),
            None => FermionState::from_amplitudes(&haar_isometry(m, n, &mut stream(cfg.seed, Domain::Instance, t)))?,
        };
        let oracle_seed = derive_seed(cfg.seed, Domain::OracleSeed, t);
        let oracle = SimulatedOracle::new(state.clone(), oracle_seed);
        let result = reconstruct_with(&oracle, n, gamma, cfg.delta, exec)?.with_truth(state.correlation())?;
        let gamma_observed = result.max_entry_error().expect("truth attached");
        let truth = brute_force_distribution_with(&state, cfg.capacity, exec)?;
        let raw = minor_distribution(&result.k_hat, n)?;
        let tv_raw = total_variation(&raw, &truth)?;
        let projection = project_to_valid_state(&result.k_hat, n)?;
        let theorem_check = check_tv_theorem(&state, &projection.state, gamma_observed, opts, exec)?
            .with_instance(format!("seed={}, trial={t}, m={m}, n={n}", cfg.seed));
        let tv_projected = theorem_check.lhs;
        Ok::<_, CliError>(FermionTrial {
            trial: t,
            oracle_seed,
            reconstruction: reconstruction_json(result.report()),
            gamma_observed,
            tv_raw,
            tv_projected,
            projection_tie: projection.tie,
            within_epsilon: tv_projected <= epsilon,
            theorem_check,
        })
    })?;
    Ok(FermionBody {
        m,
        n,
        epsilon,
        gamma,
        runs_within_epsilon: trials.iter().filter(|t| t.within_epsilon).count() as u64,
        theorem_satisfied_all: trials.iter().all(|t| t.theorem_check.satisfied),
        trials,
    })
}

fn reconstruction_json(report: ReconstructionReport<'_>) -> serde_json::Value {
    serde_json::to_value(report).expect("report serialization cannot fail")
}

fn learn_density(cfg: &ExperimentConfig, opts: &CheckOptions, exec: Execution) -> Result<DensityBody, CliError> {
    let fixed = match &cfg.state_file {
        None => None,
        Some(path) => Some(DensityMatrix::from_json_str(&fs::read_to_string(path)?)?),
    };
    let d = match &fixed {
        Some(r) => r.dim(),
        None => cfg.d.expect("validated"),
    };
    let gamma = match cfg.epsilon {
        Some(e) => gamma_for_trace_epsilon(e, d)?,
        None => cfg.gamma.expect("validated"),
    };
    let epsilon = cfg.epsilon.unwrap_or(0.5 * (d as f64).powf(1.5) * gamma);
    let trials = exec.try_map(cfg.trials as usize, |t| {
        let t = t as u64;
        let rho = match &fixed {
            Some(r) => r.clone(),
            None => random_density(d, d.min(2), &mut stream(cfg.seed, Domain::Instance, t)),
        };
        let oracle_seed = derive_seed(cfg.seed, Domain::OracleSeed, t);
        let oracle = DensityOracle::new(rho.clone(), oracle_seed);
        let result = reconstruct_density(&oracle, gamma, cfg.delta, exec)?.with_truth(rho.matrix())?;
        let gamma_observed = result.max_entry_error().expect("truth attached");
        let check = check_trace_bound(rho.matrix(), &result.k_hat, gamma_observed, opts)?
            .with_instance(format!("seed={}, trial={t}, d={d}", cfg.seed));
        Ok::<_, CliError>(DensityTrial {
            trial: t,
            oracle_seed,
            reconstruction: reconstruction_json(result.report()),
            gamma_observed,
            trace_distance: check.lhs,
            within_epsilon: check.lhs <= epsilon,
            trace_bound_check: check,
        })
    })?;
    Ok(DensityBody {
        d,
        epsilon,
        gamma,
        runs_within_epsilon: trials.iter().filter(|t| t.within_epsilon).count() as u64,
        bound_satisfied_all: trials.iter().all(|t| t.trace_bound_check.satisfied),
        trials,
    })
}

fn sample_csv(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let state = match load_fermion(cfg)? {
        Some(s) => s,
        None => {
            let (m, n) = (cfg.m.expect("validated"), cfg.n.expect("validated"));
            FermionState::from_amplitudes(&haar_isometry(m, n, &mut stream(cfg.seed, Domain::Instance, 0)))?
        }
    };
    let count = cfg.samples.expect("validated");
    let samples = sample_batch(&state, count, cfg.seed, Execution::default())?;
    let mut out = format!("# format_version={FORMAT_VERSION}\nsample,bitstring\n");
    for (i, s) in samples.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", s.bitstring()));
    }
    Ok(out)
}
