//! Mixed-state tomography with the same matching-basis measurements.
//!
//! A `d`-dimensional density matrix `rho` is measured like a one-particle
//! correlation matrix: rotating by `W` and measuring in the computational
//! basis samples from `diag(W rho W^dagger)`. The learner's pipeline then
//! recovers every entry of `rho`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analysis::{trace_distance, BoundCheckReport, CheckOptions};
use crate::error::{Error, Result};
use crate::learner::oracle::MeasurementOracle;
use crate::learner::reconstruct::{reconstruct_with, ReconstructionResult};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, unitarity_residual, DEFAULT_TOL};
use crate::matrix::{ComplexMatrix, MatrixWire};
use crate::parallel::Execution;
use crate::rng::{multinomial_counts, stream, Domain};

/// Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        Self::with_tol(rho, DEFAULT_TOL)
    }

    pub fn with_tol(rho: ComplexMatrix, tol: f64) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::Dimension(format!("density matrix must be square, got {}x{}", rho.rows(), rho.cols())));
        }
        let herm = rho.hermitian_residual();
        if herm > tol {
            return Err(Error::Validation(format!("not Hermitian: max |rho - rho^dagger| = {herm:.3e}")));
        }
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::Validation(format!("trace is {tr}, expected 1")));
        }
        let low = hermitian_eigenvalues(&rho)?.last().copied().unwrap_or(0.0);
        if low < -tol {
            return Err(Error::Validation(format!("negative eigenvalue {low:e}")));
        }
        Ok(Self { rho })
    }

    /// The pure state `|v><v|` for a unit vector `v`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let d = v.len();
        Self::new(ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn to_json_string(&self) -> String {
        let file = DensityFile { matrix: MatrixWire::from(&self.rho), d: self.dim() };
        serde_json::to_string(&file).expect("density serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DensityFile = serde_json::from_str(s)?;
        let rho = ComplexMatrix::try_from(file.matrix)?;
        if rho.rows() != file.d {
            return Err(Error::Dimension(format!("file declares d = {} but matrix has {} rows", file.d, rho.rows())));
        }
        Self::new(rho)
    }
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    #[serde(flatten)]
    matrix: MatrixWire,
    d: usize,
}

/// `G G^dagger / tr(G G^dagger)` with `G` a `d x rank` complex Gaussian matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    assert!(d >= 1 && (1..=d).contains(&rank), "need 1 <= rank <= d");
    let g = ComplexMatrix::from_fn(d, rank, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr).hermitian_part()).expect("Wishart draw is a density matrix")
}

/// Outcome counts of `shots` computational-basis measurements after the
/// unitary `w`. Diagonal entries within `tol` of zero are clamped and the
/// rest renormalized.
pub fn measure_in_basis<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    w: &ComplexMatrix,
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let d = rho.dim();
    if w.shape() != (d, d) {
        return Err(Error::Dimension(format!("basis is {}x{}, state has d = {d}", w.rows(), w.cols())));
    }
    let residual = unitarity_residual(w);
    if residual > DEFAULT_TOL {
        return Err(Error::Validation(format!("basis change is not unitary: max |W^dagger W - I| = {residual:.3e}")));
    }
    let rotated = &(w * rho.matrix()) * &w.adjoint();
    let probs: Vec<f64> = rotated.diagonal().iter().map(|z| z.re).collect();
    if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| **p < -DEFAULT_TOL) {
        return Err(Error::Validation(format!("outcome {i} has probability {p:e}")));
    }
    Ok(multinomial_counts(&probs, shots, rng))
}

/// Simulated copies of `rho`; stream `s` draws from `(seed, Basis, s)`.
#[derive(Debug, Clone)]
pub struct DensityOracle {
    rho: DensityMatrix,
    seed: u64,
}

impl DensityOracle {
    pub fn new(rho: DensityMatrix, seed: u64) -> Self {
        Self { rho, seed }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }
}

impl MeasurementOracle for DensityOracle {
    fn modes(&self) -> usize {
        self.rho.dim()
    }

    fn measure(&self, basis: &ComplexMatrix, shots: u64, stream_id: u64) -> Result<Vec<u64>> {
        measure_in_basis(&self.rho, basis, shots, &mut stream(self.seed, Domain::Basis, stream_id))
    }
}

/// Learns every entry of `rho` to accuracy `gamma` with confidence
/// `1 - delta`. The estimate is Hermitian but not projected.
pub fn reconstruct_density<O: MeasurementOracle + ?Sized>(
    oracle: &O,
    gamma: f64,
    delta: f64,
    exec: Execution,
) -> Result<ReconstructionResult> {
    reconstruct_with(oracle, 1, gamma, delta, exec)
}

/// Entry accuracy needed for trace-distance accuracy `epsilon`: `2 d^{-3/2} epsilon`.
pub fn gamma_for_trace_epsilon(epsilon: f64, d: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if d == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    Ok(2.0 * (d as f64).powf(-1.5) * epsilon)
}

/// `D_tr(rho_hat, rho) <= 1/2 d^{3/2} gamma`.
pub fn check_trace_bound(
    rho: &ComplexMatrix,
    rho_hat: &ComplexMatrix,
    gamma: f64,
    opts: &CheckOptions,
) -> Result<BoundCheckReport> {
    let d = rho.rows();
    let lhs = trace_distance(rho_hat, rho)?;
    let rhs = 0.5 * (d as f64).powf(1.5) * gamma;
    Ok(BoundCheckReport::upper_bound("trace_bound", lhs, rhs, opts.slack)
        .with_instance(format!("d={d}"))
        .with_detail("gamma_observed", gamma))
}

/// Nearest density matrix in Frobenius norm: keeps the eigenvectors and
/// projects the eigenvalues onto the probability simplex.
pub fn project_to_density(rho_hat: &ComplexMatrix) -> Result<DensityMatrix> {
    let eig = hermitian_eigen(rho_hat)?;
    // Values are sorted descending; find the simplex threshold.
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &v) in eig.values.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    let weights: Vec<f64> = eig.values.iter().map(|v| (v - theta).max(0.0)).collect();
    let d = rho_hat.rows();
    let vecs = &eig.vectors;
    let rho =
        ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|k| vecs[(i, k)] * vecs[(j, k)].conj() * weights[k]).sum());
    DensityMatrix::new(rho.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_unitary;
    use crate::learner::oracle::ExactOracle;
    use crate::learner::reconstruct::reconstruct_with_shots;

    #[test]
    fn basis_state_counts_land_on_one_outcome() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0])).unwrap();
        let c = measure_in_basis(&rho, &ComplexMatrix::identity(3), 500, &mut stream(0, Domain::Basis, 0)).unwrap();
        assert_eq!(c, vec![0, 500, 0]);
    }

    #[test]
    fn maximally_mixed_frequencies() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
        let w = haar_unitary(4, &mut stream(1, Domain::Instance, 0));
        let shots = 1_000_000;
        let c = measure_in_basis(&rho, &w, shots, &mut stream(1, Domain::Basis, 0)).unwrap();
        for x in &c {
            assert!((*x as f64 / shots as f64 - 0.25).abs() <= 0.002);
        }
        let again = measure_in_basis(&rho, &w, shots, &mut stream(1, Domain::Basis, 0)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.6, 0.6])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.2, -0.2])).is_err());
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.5])).unwrap();
        let not_unitary = ComplexMatrix::from_real_diagonal(&[2.0, 1.0]);
        assert!(measure_in_basis(&rho, &not_unitary, 1, &mut stream(0, Domain::Basis, 0)).is_err());
    }

    #[test]
    fn gamma_formula() {
        assert!((gamma_for_trace_epsilon(0.1, 4).unwrap() - 0.025).abs() < 1e-15);
        assert!((gamma_for_trace_epsilon(0.2, 1).unwrap() - 0.4).abs() < 1e-15);
        let g: Vec<f64> = (1..10).map(|d| gamma_for_trace_epsilon(0.3, d).unwrap()).collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!(gamma_for_trace_epsilon(1.0, 4).is_err());
    }

    #[test]
    fn exact_oracle_recovers_rho() {
        let rho = random_density(5, 2, &mut stream(2, Domain::Instance, 0));
        let shots = 1_000_000;
        let oracle = ExactOracle::new(rho.matrix().clone()).unwrap();
        let (rho_hat, bases) = reconstruct_with_shots(&oracle, 1, shots, Execution::Sequential).unwrap();
        assert!(bases <= 2 * 5 + 1);
        assert!((&rho_hat - rho.matrix()).max_abs() <= 2.0 * 5.0 / shots as f64);
    }

    #[test]
    fn seeded_run_meets_gamma_and_bound() {
        let rho = random_density(4, 2, &mut stream(3, Domain::Instance, 0));
        let oracle = DensityOracle::new(rho.clone(), 3);
        let res =
            reconstruct_density(&oracle, 0.02, 0.05, Execution::Parallel).unwrap().with_truth(rho.matrix()).unwrap();
        let gamma_obs = res.max_entry_error().unwrap();
        assert!(gamma_obs <= 0.02, "{gamma_obs}");
        assert!(res.k_hat.hermitian_residual() == 0.0);
        let report = check_trace_bound(rho.matrix(), &res.k_hat, gamma_obs, &CheckOptions::default()).unwrap();
        assert!(report.satisfied, "{report:?}");
    }

    #[test]
    fn projection_onto_density_matrices() {
        let raw = ComplexMatrix::from_real_diagonal(&[0.7, 0.4, -0.1]);
        let p = project_to_density(&raw).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[0.65, 0.35, 0.0]);
        assert!((p.matrix() - &want).max_abs() < 1e-12);
        let rho = random_density(4, 4, &mut stream(4, Domain::Instance, 0));
        assert!((project_to_density(rho.matrix()).unwrap().matrix() - rho.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let rho = random_density(3, 2, &mut stream(5, Domain::Instance, 0));
        let text = rho.to_json_string();
        assert!(text.contains(r#""d":3"#));
        assert_eq!(DensityMatrix::from_json_str(&text).unwrap(), rho);
    }
}
