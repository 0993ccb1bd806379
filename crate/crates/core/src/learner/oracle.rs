//! Measurement backends for the learner.

use crate::error::{Error, Result};
use crate::fermion::config::binomial;
use crate::fermion::distribution::brute_force_distribution_with;
use crate::fermion::sampler::occupancy_counts;
use crate::fermion::state::FermionState;
use crate::fermion::DEFAULT_CAPACITY;
use crate::matrix::ComplexMatrix;
use crate::parallel::Execution;
use crate::rng::{multinomial_counts, stream, Domain};

/// Black-box access to copies of an unknown state.
///
/// `measure` rotates `shots` fresh copies by the mode unitary `basis`,
/// measures each in the occupation basis and returns how many times each
/// mode was found occupied. `counts[i] / shots` must be an unbiased estimate
/// of `(V K V^dagger)_ii`. The same `(basis, shots, stream)` must always give
/// the same counts, whichever thread asks.
pub trait MeasurementOracle: Sync {
    fn modes(&self) -> usize;

    fn measure(&self, basis: &ComplexMatrix, shots: u64, stream: u64) -> Result<Vec<u64>>;
}

/// How [`SimulatedOracle`] produces shots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingBackend {
    /// Runs the sequential sampler once per shot.
    PerShot,
    /// Tabulates the exact outcome distribution and draws a multinomial.
    Tabulated,
    /// `Tabulated` when the outcome table has at most
    /// [`TABULATION_LIMIT`] entries, `PerShot` otherwise.
    #[default]
    Auto,
}

/// Largest outcome table [`SamplingBackend::Auto`] will build.
pub const TABULATION_LIMIT: u128 = 20_000;

/// Simulated copies of a known state. Shots for stream `s` come from the
/// generator `(seed, Basis, s)`.
#[derive(Debug, Clone)]
pub struct SimulatedOracle {
    state: FermionState,
    seed: u64,
    backend: SamplingBackend,
}

impl SimulatedOracle {
    pub fn new(state: FermionState, seed: u64) -> Self {
        Self { state, seed, backend: SamplingBackend::Auto }
    }

    pub fn with_backend(mut self, backend: SamplingBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn state(&self) -> &FermionState {
        &self.state
    }

    fn resolved_backend(&self) -> SamplingBackend {
        match self.backend {
            SamplingBackend::Auto => {
                if binomial(self.state.modes(), self.state.particles()) <= TABULATION_LIMIT {
                    SamplingBackend::Tabulated
                } else {
                    SamplingBackend::PerShot
                }
            }
            other => other,
        }
    }
}

impl MeasurementOracle for SimulatedOracle {
    fn modes(&self) -> usize {
        self.state.modes()
    }

    fn measure(&self, basis: &ComplexMatrix, shots: u64, stream_id: u64) -> Result<Vec<u64>> {
        let rotated = self.state.apply_mode_unitary(basis)?;
        let mut rng = stream(self.seed, Domain::Basis, stream_id);
        match self.resolved_backend() {
            SamplingBackend::PerShot => occupancy_counts(&rotated, shots, &mut rng),
            _ => {
                let dist = brute_force_distribution_with(&rotated, DEFAULT_CAPACITY, Execution::Sequential)?;
                let outcome_counts = multinomial_counts(dist.values(), shots, &mut rng);
                let mut counts = vec![0u64; rotated.modes()];
                for (config, &c) in dist.configurations().iter().zip(&outcome_counts) {
                    if c == 0 {
                        continue;
                    }
                    for mode in config.occupied() {
                        counts[mode] += c;
                    }
                }
                Ok(counts)
            }
        }
    }
}

/// Noise-free oracle: returns `round(shots * (V M V^dagger)_ii)` for a fixed
/// Hermitian `M`. Models the infinite-shot limit.
#[derive(Debug, Clone)]
pub struct ExactOracle {
    matrix: ComplexMatrix,
}

impl ExactOracle {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("exact oracle needs a square matrix".into()));
        }
        Ok(Self { matrix })
    }
}

impl MeasurementOracle for ExactOracle {
    fn modes(&self) -> usize {
        self.matrix.rows()
    }

    fn measure(&self, basis: &ComplexMatrix, shots: u64, _stream: u64) -> Result<Vec<u64>> {
        let rotated = &(basis * &self.matrix) * &basis.adjoint();
        Ok(rotated.diagonal().iter().map(|z| (z.re.clamp(0.0, 1.0) * shots as f64).round() as u64).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::gates::beamsplitter_real;
    use crate::haar::haar_isometry;

    fn haar_state(seed: u64) -> FermionState {
        FermionState::from_amplitudes(&haar_isometry(5, 2, &mut stream(seed, Domain::Instance, 0))).unwrap()
    }

    #[test]
    fn counts_sum_to_n_times_shots() {
        for backend in [SamplingBackend::PerShot, SamplingBackend::Tabulated] {
            let oracle = SimulatedOracle::new(haar_state(1), 9).with_backend(backend);
            let counts = oracle.measure(&ComplexMatrix::identity(5), 5000, 3).unwrap();
            assert_eq!(counts.iter().sum::<u64>(), 2 * 5000);
            assert!(counts.iter().all(|&c| c <= 5000));
        }
    }

    #[test]
    fn repeated_calls_agree() {
        let oracle = SimulatedOracle::new(haar_state(2), 4);
        let v = beamsplitter_real(5, 1, 3).unwrap();
        assert_eq!(oracle.measure(&v, 1000, 7).unwrap(), oracle.measure(&v, 1000, 7).unwrap());
        assert_ne!(oracle.measure(&v, 1000, 7).unwrap(), oracle.measure(&v, 1000, 8).unwrap());
    }

    #[test]
    fn both_backends_estimate_the_rotated_diagonal() {
        let state = haar_state(3);
        let v = beamsplitter_real(5, 0, 4).unwrap();
        let truth = state.apply_mode_unitary(&v).unwrap();
        let shots = 200_000;
        for backend in [SamplingBackend::PerShot, SamplingBackend::Tabulated] {
            let oracle = SimulatedOracle::new(state.clone(), 11).with_backend(backend);
            let counts = oracle.measure(&v, shots, 0).unwrap();
            for (i, &c) in counts.iter().enumerate() {
                let p = truth.correlation()[(i, i)].re;
                let sigma = (p * (1.0 - p) / shots as f64).sqrt();
                assert!((c as f64 / shots as f64 - p).abs() <= 5.0 * sigma + 1e-12, "{backend:?} mode {i}");
            }
        }
    }

    #[test]
    fn exact_oracle_rounds_expected_counts() {
        let k = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let oracle = ExactOracle::new(k).unwrap();
        let counts = oracle.measure(&beamsplitter_real(2, 0, 1).unwrap(), 1000, 0).unwrap();
        assert_eq!(counts, vec![1000, 0]);
    }
}
