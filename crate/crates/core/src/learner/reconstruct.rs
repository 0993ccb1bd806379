//! Reconstruction of a correlation matrix from one-mode statistics.
//!
//! The diagonal comes from a single standard-basis run. For every round of a
//! [`MatchingSchedule`] the learner measures twice more, once with the real
//! and once with the imaginary beamsplitter on every pair of the round, and
//! solves each pair's rotated diagonal for `Re k_ij` and `Im k_ij`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermion::gates::{matching_basis, Rotation};
use crate::learner::budget::shots_per_basis;
use crate::learner::oracle::MeasurementOracle;
use crate::learner::schedule::{round_robin_matchings, MatchingSchedule};
use crate::matrix::ComplexMatrix;
use crate::parallel::Execution;

/// Oracle stream used for the standard-basis run.
pub const STANDARD_STREAM: u64 = 0;

/// Oracle stream for one rotated basis: `1 + 2 * round` for the real
/// beamsplitter and `2 + 2 * round` for the imaginary one.
pub fn basis_stream(round: usize, rotation: Rotation) -> u64 {
    let offset = match rotation {
        Rotation::Real => 1,
        Rotation::Imag => 2,
    };
    2 * round as u64 + offset
}

/// Identifies one rotated-diagonal statistic: the estimate of
/// `(V K V^dagger)_ii` for the pair `(i, j)` under `rotation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StatisticId {
    pub rotation: Rotation,
    pub i: usize,
    pub j: usize,
}

pub type PairStatistics = BTreeMap<StatisticId, f64>;

fn frequencies(counts: Vec<u64>, m: usize, shots: u64) -> Result<Vec<f64>> {
    if counts.len() != m {
        return Err(Error::OracleContract(format!("expected {m} counts, oracle returned {}", counts.len())));
    }
    if let Some((i, c)) = counts.iter().enumerate().find(|(_, &c)| c > shots) {
        return Err(Error::OracleContract(format!("mode {i} reported {c} occupations in {shots} shots")));
    }
    Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
}

/// One standard-basis run: `k_ii` estimated by the occupation frequency of mode `i`.
pub fn estimate_diagonals<O: MeasurementOracle + ?Sized>(oracle: &O, shots: u64) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    let m = oracle.modes();
    let counts = oracle.measure(&ComplexMatrix::identity(m), shots, STANDARD_STREAM)?;
    frequencies(counts, m, shots)
}

/// Runs both beamsplitter bases for every round and records each pair's
/// rotated diagonal at its lower index. Makes `2 * rounds` oracle calls.
pub fn estimate_pair_statistics<O: MeasurementOracle + ?Sized>(
    oracle: &O,
    schedule: &MatchingSchedule,
    shots: u64,
    exec: Execution,
) -> Result<PairStatistics> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    let m = oracle.modes();
    if schedule.modes() != m {
        return Err(Error::Dimension(format!("schedule covers {} modes, oracle has {m}", schedule.modes())));
    }
    let jobs: Vec<(usize, Rotation)> =
        (0..schedule.len()).flat_map(|r| Rotation::ALL.into_iter().map(move |rot| (r, rot))).collect();
    let results = exec.try_map(jobs.len(), |idx| {
        let (round, rotation) = jobs[idx];
        let pairs = &schedule.rounds()[round];
        let basis = matching_basis(m, pairs, rotation)?;
        let counts = oracle.measure(&basis, shots, basis_stream(round, rotation))?;
        let freq = frequencies(counts, m, shots)?;
        Ok::<_, Error>(pairs.iter().map(|&(i, j)| (StatisticId { rotation, i, j }, freq[i])).collect::<Vec<_>>())
    })?;
    Ok(results.into_iter().flatten().collect())
}

/// Solves `k'_real = (k_ii + k_jj)/2 + Re k_ij` and
/// `k'_imag = (k_ii + k_jj)/2 + Im k_ij` for `k_ij`.
pub fn solve_entry(k_ii: f64, k_jj: f64, rotated_real: f64, rotated_imag: f64) -> Complex64 {
    let mean = 0.5 * (k_ii + k_jj);
    Complex64::new(rotated_real - mean, rotated_imag - mean)
}

/// Assembles the Hermitian estimate from the diagonal and pair statistics.
pub fn assemble(diagonal: &[f64], stats: &PairStatistics) -> Result<ComplexMatrix> {
    let m = diagonal.len();
    let mut k = ComplexMatrix::zeros(m, m);
    for (i, &d) in diagonal.iter().enumerate() {
        k[(i, i)] = Complex64::new(d.clamp(0.0, 1.0), 0.0);
    }
    for (id, &real) in stats.iter().filter(|(id, _)| id.rotation == Rotation::Real) {
        let imag_id = StatisticId { rotation: Rotation::Imag, ..*id };
        let imag = *stats.get(&imag_id).ok_or_else(|| {
            Error::OracleContract(format!("missing imaginary statistic for pair ({}, {})", id.i, id.j))
        })?;
        let entry = solve_entry(diagonal[id.i], diagonal[id.j], real, imag);
        k[(id.i, id.j)] = entry;
        k[(id.j, id.i)] = entry.conj();
    }
    Ok(k)
}

/// Estimate of a Hermitian matrix with its shot accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub modes: usize,
    pub particles: usize,
    pub gamma: f64,
    pub delta: f64,
    pub shots_per_basis: u64,
    pub bases_total: u64,
    pub shots_total: u64,
    pub k_hat: ComplexMatrix,
    /// `|k_hat_ij - k_ij|`, row-major, when the truth was supplied.
    pub per_entry_error: Option<Vec<f64>>,
}

impl ReconstructionResult {
    /// Attaches per-entry errors against the true matrix.
    pub fn with_truth(mut self, truth: &ComplexMatrix) -> Result<Self> {
        if truth.shape() != self.k_hat.shape() {
            return Err(Error::Dimension("truth and estimate differ in shape".into()));
        }
        let diff = &self.k_hat - truth;
        self.per_entry_error = Some(diff.as_slice().iter().map(|z| z.norm()).collect());
        Ok(self)
    }

    pub fn max_entry_error(&self) -> Option<f64> {
        self.per_entry_error.as_ref().map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    pub fn report(&self) -> ReconstructionReport<'_> {
        ReconstructionReport {
            m: self.modes,
            n: self.particles,
            gamma: self.gamma,
            delta: self.delta,
            shots_per_basis: self.shots_per_basis,
            bases_total: self.bases_total,
            shots_total: self.shots_total,
            k_hat: &self.k_hat,
            max_entry_error: self.max_entry_error(),
        }
    }
}

/// JSON form of a [`ReconstructionResult`].
#[derive(Debug, Serialize)]
pub struct ReconstructionReport<'a> {
    pub m: usize,
    pub n: usize,
    pub gamma: f64,
    pub delta: f64,
    pub shots_per_basis: u64,
    pub bases_total: u64,
    pub shots_total: u64,
    #[serde(rename = "K_hat")]
    pub k_hat: &'a ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_entry_error: Option<f64>,
}

/// Runs the full protocol with an explicit shot count per basis.
pub fn reconstruct_with_shots<O: MeasurementOracle + ?Sized>(
    oracle: &O,
    particles: usize,
    shots: u64,
    exec: Execution,
) -> Result<(ComplexMatrix, u64)> {
    let m = oracle.modes();
    let schedule = round_robin_matchings(m)?;
    let diagonal = estimate_diagonals(oracle, shots)?;
    let stats = estimate_pair_statistics(oracle, &schedule, shots, exec)?;
    let k_hat = assemble(&diagonal, &stats)?;
    debug_assert!(particles <= m);
    Ok((k_hat, 1 + 2 * schedule.len() as u64))
}

/// Learns `K` to per-entry accuracy `gamma` with confidence `1 - delta`.
///
/// The estimate is Hermitian with diagonal in `[0, 1]` but is not projected
/// onto valid states; see [`crate::learner::project_to_valid_state`].
pub fn reconstruct<O: MeasurementOracle + ?Sized>(
    oracle: &O,
    particles: usize,
    gamma: f64,
    delta: f64,
) -> Result<ReconstructionResult> {
    reconstruct_with(oracle, particles, gamma, delta, Execution::default())
}

pub fn reconstruct_with<O: MeasurementOracle + ?Sized>(
    oracle: &O,
    particles: usize,
    gamma: f64,
    delta: f64,
    exec: Execution,
) -> Result<ReconstructionResult> {
    let m = oracle.modes();
    if particles > m {
        return Err(Error::Domain(format!("{particles} particles exceed {m} modes")));
    }
    let shots = shots_per_basis(gamma, delta, m)?;
    let (k_hat, bases_total) = reconstruct_with_shots(oracle, particles, shots, exec)?;
    Ok(ReconstructionResult {
        modes: m,
        particles,
        gamma,
        delta,
        shots_per_basis: shots,
        bases_total,
        shots_total: shots * bases_total,
        k_hat,
        per_entry_error: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::fixtures::complex_necessity_amplitudes;
    use crate::fermion::state::FermionState;
    use crate::learner::oracle::{ExactOracle, SimulatedOracle};

    #[test]
    fn solve_entry_examples() {
        assert_eq!(solve_entry(0.5, 0.5, 0.5, 0.5), Complex64::new(0.0, 0.0));
        assert_eq!(solve_entry(0.5, 0.5, 1.0, 0.5), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn solve_entry_recovers_fixture_pair_from_exact_rotations() {
        let state = FermionState::from_amplitudes(&complex_necessity_amplitudes()).unwrap();
        let k = state.correlation();
        let (i, j) = (1, 2);
        let rotated = |rot| {
            let v = crate::fermion::gates::beamsplitter(4, i, j, rot).unwrap();
            state.apply_mode_unitary(&v).unwrap().correlation()[(i, i)].re
        };
        let entry = solve_entry(k[(i, i)].re, k[(j, j)].re, rotated(Rotation::Real), rotated(Rotation::Imag));
        assert!((entry - k[(i, j)]).norm() < 1e-12);
    }

    #[test]
    fn point_mass_is_learned_exactly() {
        let k = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]);
        let state = FermionState::from_correlation(k.clone(), 2).unwrap();
        let oracle = SimulatedOracle::new(state, 3);
        let diag = estimate_diagonals(&oracle, 17).unwrap();
        assert_eq!(diag, vec![1.0, 1.0, 0.0, 0.0]);
        let result = reconstruct(&oracle, 2, 0.2, 0.1).unwrap();
        // Every rotated statistic of a diagonal 0/1 state is exactly 1/2 or 0/1.
        for i in 0..4 {
            for j in 0..4 {
                if (i < 2) == (j < 2) && i != j {
                    assert!(result.k_hat[(i, j)].norm() < 1e-12);
                }
            }
            assert_eq!(result.k_hat[(i, i)], k[(i, i)]);
        }
    }

    #[test]
    fn symmetric_pair_rotates_to_point_mass() {
        let k = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let oracle = SimulatedOracle::new(FermionState::from_correlation(k, 1).unwrap(), 0);
        let schedule = round_robin_matchings(2).unwrap();
        let stats = estimate_pair_statistics(&oracle, &schedule, 1000, Execution::Sequential).unwrap();
        let id = StatisticId { rotation: Rotation::Real, i: 0, j: 1 };
        assert_eq!(stats[&id], 1.0);
    }

    #[test]
    fn identity_like_state_gives_half_sums() {
        let k = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0, 0.0]);
        let oracle = ExactOracle::new(k.clone()).unwrap();
        let schedule = round_robin_matchings(4).unwrap();
        let stats = estimate_pair_statistics(&oracle, &schedule, 1000, Execution::Sequential).unwrap();
        assert_eq!(stats.len(), 12);
        for (id, v) in stats {
            let expected = 0.5 * (k[(id.i, id.i)].re + k[(id.j, id.j)].re);
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn bases_count_and_accounting() {
        let state = FermionState::from_amplitudes(&complex_necessity_amplitudes()).unwrap();
        let r = reconstruct(&SimulatedOracle::new(state, 1), 2, 0.1, 0.1).unwrap();
        assert_eq!(r.bases_total, 2 * 3 + 1);
        assert_eq!(r.shots_total, r.shots_per_basis * r.bases_total);
        assert!(r.k_hat.hermitian_residual() == 0.0);
    }

    #[test]
    fn misbehaving_oracle_is_caught() {
        struct Greedy;
        impl MeasurementOracle for Greedy {
            fn modes(&self) -> usize {
                2
            }
            fn measure(&self, _: &ComplexMatrix, shots: u64, _: u64) -> Result<Vec<u64>> {
                Ok(vec![shots + 1, 0])
            }
        }
        assert!(matches!(estimate_diagonals(&Greedy, 10), Err(Error::OracleContract(_))));
    }

    #[test]
    fn report_fields() {
        let k = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let oracle = ExactOracle::new(k.clone()).unwrap();
        let r = reconstruct(&oracle, 1, 0.5, 0.5).unwrap().with_truth(&k).unwrap();
        let json = serde_json::to_value(r.report()).unwrap();
        for key in
            ["m", "n", "gamma", "delta", "shots_per_basis", "bases_total", "shots_total", "K_hat", "max_entry_error"]
        {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["bases_total"], 3);
    }
}
