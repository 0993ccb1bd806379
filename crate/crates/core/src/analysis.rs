//! Distances between distributions and states, and numeric checks of the
//! inequalities behind the learning guarantee.
//!
//! Every `check_*` function computes both sides of one inequality (or
//! identity) on a concrete instance and returns a [`BoundCheckReport`]; none
//! of them panic or error when the inequality fails.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::config::ModeConfiguration;
use crate::fermion::distribution::{brute_force_distribution_with, OutcomeDistribution};
use crate::fermion::fixtures::complex_necessity_amplitudes;
use crate::fermion::lift::lift_phi_with_capacity;
use crate::fermion::state::FermionState;
use crate::fermion::DEFAULT_CAPACITY;
use crate::haar::haar_isometry;
use crate::linalg::{determinant, hermitian_eigenvalues, qr, singular_values, spectral_norm, svd, DEFAULT_TOL};
use crate::matrix::ComplexMatrix;
use crate::parallel::Execution;
use crate::rng::{stream, Domain};

/// Additive slack used by the checks unless overridden.
pub const DEFAULT_SLACK: f64 = 1e-9;

/// Outcome of one numeric check.
///
/// For inequality checks `satisfied` is `lhs <= rhs + slack`. Identity
/// checks (`*_identity`, `*_product`) require `|lhs - rhs| <= slack`.
/// Quantities other than the two sides go in `details`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub instance_descriptor: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl BoundCheckReport {
    /// `lhs <= rhs + slack`.
    pub fn upper_bound(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self::new(name, lhs, rhs, lhs <= rhs + slack)
    }

    /// `|lhs - rhs| <= slack`.
    pub fn identity(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self::new(name, lhs, rhs, (lhs - rhs).abs() <= slack)
    }

    fn new(name: &str, lhs: f64, rhs: f64, satisfied: bool) -> Self {
        Self {
            name: name.to_owned(),
            lhs,
            rhs,
            satisfied: satisfied && lhs.is_finite() && rhs.is_finite(),
            instance_descriptor: String::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_instance(mut self, descriptor: impl Into<String>) -> Self {
        self.instance_descriptor = descriptor.into();
        self
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_owned(), value);
        self
    }
}

/// Tolerances shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub slack: f64,
    /// Largest lift or outcome table a check may build.
    pub capacity: u128,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { slack: DEFAULT_SLACK, capacity: DEFAULT_CAPACITY }
    }
}

/// `1/2 sum_S |p_S - q_S|`. Signed entries are allowed, so raw minors of an
/// unprojected estimate can be compared directly.
pub fn total_variation(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    if p.modes() != q.modes() || p.particles() != q.particles() || p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "distributions over different supports: (m={}, n={}) vs (m={}, n={})",
            p.modes(),
            p.particles(),
            q.modes(),
            q.particles()
        )));
    }
    Ok(0.5 * p.values().iter().zip(q.values()).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Half the sum of absolute eigenvalues of `rho - sigma`.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() || !rho.is_square() {
        return Err(Error::Dimension(format!(
            "trace distance needs equal square shapes, got {}x{} and {}x{}",
            rho.rows(),
            rho.cols(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    for (label, x) in [("first", rho), ("second", sigma)] {
        let r = x.hermitian_residual();
        if r > DEFAULT_TOL {
            return Err(Error::Validation(format!("{label} argument is not Hermitian: max |X - X^dagger| = {r:.3e}")));
        }
    }
    let eig = hermitian_eigenvalues(&(rho - sigma))?;
    Ok(0.5 * eig.iter().map(|l| l.abs()).sum::<f64>())
}

fn require_isometry(label: &str, a: &ComplexMatrix) -> Result<()> {
    if a.rows() < a.cols() {
        return Err(Error::Dimension(format!("{label} is {}x{}; needs m >= n", a.rows(), a.cols())));
    }
    let r = a.isometry_residual();
    if r > DEFAULT_TOL {
        return Err(Error::Validation(format!("{label} is not column-orthonormal: max |A^dagger A - I| = {r:.3e}")));
    }
    Ok(())
}

fn require_same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("shapes differ: {}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    Ok(())
}

fn shape_label(a: &ComplexMatrix) -> String {
    format!("m={}, n={}", a.rows(), a.cols())
}

/// Claimed identity `||A - B||_2 = max_i |sigma_i - 1|`, `sigma` the singular
/// values of `A^dagger B`. `details` carries `max_sqrt_2_one_minus_sigma`,
/// the value `||A - B R||_2` takes after the best unitary alignment `R`.
pub fn check_singular_value_identity(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    opts: &CheckOptions,
) -> Result<BoundCheckReport> {
    require_same_shape(a, b)?;
    require_isometry("A", a)?;
    require_isometry("B", b)?;
    let lhs = spectral_norm(&(a - b));
    let sigma = singular_values(&(&a.adjoint() * b));
    let rhs = sigma.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    let aligned = sigma.iter().map(|s| (2.0 * (1.0 - s.min(1.0))).sqrt()).fold(0.0, f64::max);
    Ok(BoundCheckReport::identity("singular_value_identity", lhs, rhs, opts.slack)
        .with_instance(shape_label(a))
        .with_detail("max_sqrt_2_one_minus_sigma", aligned))
}

/// Norm of the lift against the product of singular values.
///
/// For a square `x` the lift is the single entry `det(x)`, so the comparison
/// is `|det x| = prod sigma_i`. Otherwise `x` is `m x n` and the comparison
/// is `||phi(x)||_2 = prod sigma_i`.
pub fn check_phi_norm_product(x: &ComplexMatrix, opts: &CheckOptions) -> Result<BoundCheckReport> {
    let (m, n) = x.shape();
    if m < n {
        return Err(Error::Dimension(format!("input is {m}x{n}; needs m >= n")));
    }
    let lhs =
        if m == n { determinant(x)?.norm() } else { lift_phi_with_capacity(x, n, opts.capacity)?.frobenius_norm() };
    let rhs: f64 = singular_values(x).iter().product();
    Ok(BoundCheckReport::identity("phi_norm_product", lhs, rhs, opts.slack).with_instance(shape_label(x)))
}

/// `||phi(A_hat) - phi(A)||_2 <= n ||A_hat - A||_2`.
pub fn check_lifting_lipschitz(
    a: &ComplexMatrix,
    a_hat: &ComplexMatrix,
    opts: &CheckOptions,
) -> Result<BoundCheckReport> {
    require_same_shape(a, a_hat)?;
    require_isometry("A", a)?;
    require_isometry("A_hat", a_hat)?;
    let n = a.cols();
    let lhs = lift_difference_norm(a, a_hat, opts.capacity)?;
    let rhs = n as f64 * spectral_norm(&(a_hat - a));
    Ok(BoundCheckReport::upper_bound("lifting_lipschitz", lhs, rhs, opts.slack).with_instance(shape_label(a)))
}

fn lift_difference_norm(a: &ComplexMatrix, a_hat: &ComplexMatrix, capacity: u128) -> Result<f64> {
    let n = a.cols();
    let phi = lift_phi_with_capacity(a, n, capacity)?;
    let phi_hat = lift_phi_with_capacity(a_hat, n, capacity)?;
    Ok((&phi_hat - &phi).frobenius_norm())
}

/// Unitary `R` minimizing `||A_hat R - A||`: with `A_hat^dagger A = Q S V^dagger`,
/// `R = Q V^dagger`.
pub fn procrustes_alignment(a: &ComplexMatrix, a_hat: &ComplexMatrix) -> ComplexMatrix {
    let f = svd(&(&a_hat.adjoint() * a));
    &f.left * &f.right.adjoint()
}

/// `1/2 ||A_hat R - A||_2 <= ||K_hat - K||_2 <= 2 ||A_hat R - A||_2` with the
/// Procrustes alignment `R`. `lhs` and `rhs` are the upper inequality;
/// `details.lower` is the left end and both inequalities must hold.
pub fn check_procrustes_sandwich(
    a: &ComplexMatrix,
    a_hat: &ComplexMatrix,
    opts: &CheckOptions,
) -> Result<BoundCheckReport> {
    require_same_shape(a, a_hat)?;
    require_isometry("A", a)?;
    require_isometry("A_hat", a_hat)?;
    let r = procrustes_alignment(a, a_hat);
    let aligned = spectral_norm(&(&(a_hat * &r) - a));
    let k = a * &a.adjoint();
    let k_hat = a_hat * &a_hat.adjoint();
    let middle = spectral_norm(&(&k_hat - &k));
    let lower = 0.5 * aligned;
    let mut report = BoundCheckReport::upper_bound("procrustes_sandwich", middle, 2.0 * aligned, opts.slack)
        .with_instance(shape_label(a))
        .with_detail("lower", lower)
        .with_detail("aligned_distance", aligned);
    report.satisfied &= lower <= middle + opts.slack;
    Ok(report)
}

/// `||K_hat - K||_2 <= sqrt(m) gamma` given every entry of `K_hat - K` has
/// modulus at most `gamma`. A violated precondition is reported through
/// `details.precondition_met` (0 or 1), not raised.
pub fn check_entrywise_to_spectral(
    k: &ComplexMatrix,
    k_hat: &ComplexMatrix,
    gamma: f64,
    opts: &CheckOptions,
) -> Result<BoundCheckReport> {
    require_same_shape(k, k_hat)?;
    if !k.is_square() {
        return Err(Error::Dimension("correlation matrices must be square".into()));
    }
    let diff = k_hat - k;
    let max_entry = diff.max_abs();
    let m = k.rows();
    let lhs = spectral_norm(&diff);
    let rhs = (m as f64).sqrt() * gamma;
    Ok(BoundCheckReport::upper_bound("entrywise_to_spectral", lhs, rhs, opts.slack)
        .with_instance(format!("m={m}"))
        .with_detail("max_entry_error", max_entry)
        .with_detail("precondition_met", f64::from(u8::from(max_entry <= gamma + opts.slack))))
}

/// `d_TV(D_K_hat, D_K) <= 2 n sqrt(m) gamma`, with `gamma` the observed
/// max-entry error of the raw estimate and `projected` the state it was
/// rounded to.
pub fn check_tv_theorem(
    state: &FermionState,
    projected: &FermionState,
    gamma: f64,
    opts: &CheckOptions,
    exec: Execution,
) -> Result<BoundCheckReport> {
    if state.modes() != projected.modes() || state.particles() != projected.particles() {
        return Err(Error::Dimension("states have different (m, n)".into()));
    }
    let (m, n) = (state.modes(), state.particles());
    let p = brute_force_distribution_with(state, opts.capacity, exec)?;
    let q = brute_force_distribution_with(projected, opts.capacity, exec)?;
    let lhs = total_variation(&q, &p)?;
    let rhs = 2.0 * n as f64 * (m as f64).sqrt() * gamma;
    Ok(BoundCheckReport::upper_bound("tv_theorem", lhs, rhs, opts.slack)
        .with_instance(format!("m={m}, n={n}"))
        .with_detail("gamma_observed", gamma))
}

/// Trace distance between the pure states with amplitude vectors `u`, `v`:
/// `sqrt(1 - |<u, v>|^2)`.
pub fn pure_state_trace_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    let overlap: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    (1.0 - overlap.norm_sqr()).max(0.0).sqrt()
}

/// The variation bound checked link by link:
/// `d_TV <= D_tr(psi_hat, psi) <= ||phi(A_hat) - phi(A)||_2 <= n ||A_hat - A||_2`.
/// Returns one report per link so a failure points at its step.
pub fn check_variation_chain(
    a: &ComplexMatrix,
    a_hat: &ComplexMatrix,
    opts: &CheckOptions,
) -> Result<Vec<BoundCheckReport>> {
    require_same_shape(a, a_hat)?;
    require_isometry("A", a)?;
    require_isometry("A_hat", a_hat)?;
    let n = a.cols();
    let label = shape_label(a);
    let phi = lift_phi_with_capacity(a, n, opts.capacity)?;
    let phi_hat = lift_phi_with_capacity(a_hat, n, opts.capacity)?;
    let p = brute_force_distribution_with(&FermionState::from_amplitudes(a)?, opts.capacity, Execution::Sequential)?;
    let q =
        brute_force_distribution_with(&FermionState::from_amplitudes(a_hat)?, opts.capacity, Execution::Sequential)?;
    let tv = total_variation(&q, &p)?;
    let dtr = pure_state_trace_distance(phi_hat.as_slice(), phi.as_slice());
    let lifted = (&phi_hat - &phi).frobenius_norm();
    let spectral = n as f64 * spectral_norm(&(a_hat - a));
    Ok(vec![
        BoundCheckReport::upper_bound("variation_chain_tv_to_trace", tv, dtr, opts.slack).with_instance(label.clone()),
        BoundCheckReport::upper_bound("variation_chain_trace_to_lift", dtr, lifted, opts.slack)
            .with_instance(label.clone()),
        BoundCheckReport::upper_bound("variation_chain_lift_to_spectral", lifted, spectral, opts.slack)
            .with_instance(label),
    ])
}

/// Tolerance for the published probabilities of the complex-necessity example.
pub const FIXTURE_TOL: f64 = 1e-12;

/// The 4-mode, 2-particle example whose single and pair marginals admit no
/// real correlation matrix: `p1 = 1/4`, `p2 = p3 = 21/40`,
/// `p12 = p13 = p23 = 1/10` (modes counted from 1).
///
/// `lhs` is the largest deviation from those values; `details` lists each
/// computed probability.
pub fn fixture_complex_necessity() -> Result<BoundCheckReport> {
    let state = FermionState::from_amplitudes(&complex_necessity_amplitudes())?;
    let expected: [(&str, &[usize], f64); 6] = [
        ("p1", &[0], 0.25),
        ("p2", &[1], 0.525),
        ("p3", &[2], 0.525),
        ("p12", &[0, 1], 0.1),
        ("p13", &[0, 2], 0.1),
        ("p23", &[1, 2], 0.1),
    ];
    let mut worst = 0.0f64;
    let mut details = BTreeMap::new();
    for (key, modes, want) in expected {
        let got = state.marginal_probability(&ModeConfiguration::new(4, modes)?)?;
        worst = worst.max((got - want).abs());
        details.insert(key.to_owned(), got);
    }
    let mut report =
        BoundCheckReport::upper_bound("fixture_complex_necessity", worst, FIXTURE_TOL, 0.0).with_instance("m=4, n=2");
    report.details = details;
    Ok(report)
}

/// Shapes cycled through by [`verification_suite`].
pub const SUITE_SHAPES: [(usize, usize); 6] = [(4, 2), (5, 2), (6, 2), (4, 3), (5, 3), (6, 3)];

/// Size of the perturbation used for the odd-numbered suite instances.
pub const SUITE_PERTURBATION: f64 = 0.05;

/// One instance of the verification ensemble: `(A, A_hat)`, both `m x n`
/// column-orthonormal.
///
/// Even indices pair two independent Haar isometries. Odd indices take
/// `A_hat` from the QR factorization of `A + eta G`, `G` complex Gaussian,
/// so the pair is close, as it is after learning.
pub fn suite_instance(seed: u64, index: u64) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = SUITE_SHAPES[(index % SUITE_SHAPES.len() as u64) as usize];
    let mut rng = stream(seed, Domain::Instance, index);
    let a = haar_isometry(m, n, &mut rng);
    let a_hat = if index.is_multiple_of(2) {
        haar_isometry(m, n, &mut rng)
    } else {
        let mut prng = stream(seed, Domain::Perturbation, index);
        perturbed_isometry(&a, SUITE_PERTURBATION, &mut prng)
    };
    (a, a_hat)
}

/// Re-orthonormalized `A + eta G` with `G` i.i.d. standard complex Gaussian.
pub fn perturbed_isometry<R: Rng + ?Sized>(a: &ComplexMatrix, eta: f64, rng: &mut R) -> ComplexMatrix {
    let scale = eta * std::f64::consts::FRAC_1_SQRT_2;
    let noisy = ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        a[(i, j)] + Complex64::new(re * scale, im * scale)
    });
    let (q, r) = qr(&noisy);
    // Fix the column phases so that A_hat -> A as eta -> 0.
    ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let d = r[(j, j)];
        if d.norm() == 0.0 {
            q[(i, j)]
        } else {
            q[(i, j)] * d / d.norm()
        }
    })
}

/// Every check on one ensemble instance.
pub fn check_instance(a: &ComplexMatrix, a_hat: &ComplexMatrix, opts: &CheckOptions) -> Result<Vec<BoundCheckReport>> {
    let k = a * &a.adjoint();
    let k_hat = a_hat * &a_hat.adjoint();
    let gamma = (&k_hat - &k).max_abs();
    let mut out = vec![
        check_singular_value_identity(a, a_hat, opts)?,
        check_phi_norm_product(a, opts)?,
        check_phi_norm_product(&(&a_hat.adjoint() * a), opts)?,
        check_lifting_lipschitz(a, a_hat, opts)?,
        check_procrustes_sandwich(a, a_hat, opts)?,
        check_entrywise_to_spectral(&k, &k_hat, gamma, opts)?,
    ];
    out.extend(check_variation_chain(a, a_hat, opts)?);
    Ok(out)
}

/// Runs [`check_instance`] on `instances` seeded pairs from [`suite_instance`]
/// and returns the reports in instance order.
pub fn verification_suite(
    seed: u64,
    instances: u64,
    opts: &CheckOptions,
    exec: Execution,
) -> Result<Vec<BoundCheckReport>> {
    let per = exec.try_map(instances as usize, |i| {
        let (a, a_hat) = suite_instance(seed, i as u64);
        let kind = if i % 2 == 0 { "independent" } else { "perturbed" };
        let reports = check_instance(&a, &a_hat, opts)?;
        Ok::<_, Error>(
            reports
                .into_iter()
                .map(|r| {
                    let shape = r.instance_descriptor.clone();
                    r.with_instance(format!("seed={seed}, instance={i}, {kind}, {shape}"))
                })
                .collect::<Vec<_>>(),
        )
    })?;
    Ok(per.into_iter().flatten().collect())
}

/// Pass counts per check name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CheckTally {
    pub passed: usize,
    pub total: usize,
}

impl CheckTally {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

pub fn tally(reports: &[BoundCheckReport]) -> BTreeMap<String, CheckTally> {
    let mut out: BTreeMap<String, CheckTally> = BTreeMap::new();
    for r in reports {
        let t = out.entry(r.name.clone()).or_default();
        t.total += 1;
        if r.satisfied {
            t.passed += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::distribution::brute_force_distribution;
    use crate::fermion::gates::phaseshifter;
    use crate::haar::haar_unitary;

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    #[test]
    fn tv_of_point_masses() {
        let p = OutcomeDistribution::from_values(2, 1, vec![1.0, 0.0]).unwrap();
        let q = OutcomeDistribution::from_values(2, 1, vec![0.0, 1.0]).unwrap();
        assert_eq!(total_variation(&p, &q).unwrap(), 1.0);
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        let r = OutcomeDistribution::from_values(3, 1, vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(total_variation(&p, &r), Err(Error::Dimension(_))));
    }

    #[test]
    fn trace_distance_basics() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let b = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        let bad = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(trace_distance(&a, &bad), Err(Error::Validation(_))));
    }

    #[test]
    fn identity_holds_for_equal_inputs() {
        let a = haar_isometry(6, 3, &mut stream(1, Domain::Instance, 0));
        let r = check_singular_value_identity(&a, &a, &opts()).unwrap();
        assert!(r.satisfied && r.lhs < 1e-12 && r.rhs < 1e-12);
    }

    #[test]
    fn phase_gauge_separates_the_two_sides() {
        // B = A diag(e^{i theta}, 1, 1): A^dagger B is unitary, so every sigma is 1,
        // yet A - B is a nonzero rank-one matrix of norm |e^{i theta} - 1|.
        let a = haar_isometry(6, 3, &mut stream(2, Domain::Instance, 0));
        let theta = 0.7;
        let b = &a * &phaseshifter(3, 0, theta).unwrap();
        let r = check_singular_value_identity(&a, &b, &opts()).unwrap();
        let gap = (Complex64::from_polar(1.0, theta) - 1.0).norm();
        assert!((r.lhs - gap).abs() < 1e-12);
        assert!(r.rhs < 1e-12);
        assert!(!r.satisfied);
        assert!(r.details["max_sqrt_2_one_minus_sigma"] < 1e-6);
    }

    #[test]
    fn phi_norm_of_isometry_is_one() {
        for n in 1..=3 {
            let a = haar_isometry(6, n, &mut stream(3, Domain::Instance, n as u64));
            let r = check_phi_norm_product(&a, &opts()).unwrap();
            assert!(r.satisfied && (r.lhs - 1.0).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn phi_norm_of_overlap_matches_singular_product() {
        let a = haar_isometry(6, 2, &mut stream(4, Domain::Instance, 0));
        let b = haar_isometry(6, 2, &mut stream(4, Domain::Instance, 1));
        let r = check_phi_norm_product(&(&b.adjoint() * &a), &opts()).unwrap();
        assert!(r.satisfied);
        let s = singular_values(&(&b.adjoint() * &a));
        assert!((r.rhs - s[0] * s[1]).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_is_tight_for_one_particle() {
        let a = haar_isometry(5, 1, &mut stream(5, Domain::Instance, 0));
        let b = haar_isometry(5, 1, &mut stream(5, Domain::Instance, 1));
        let r = check_lifting_lipschitz(&a, &b, &opts()).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12 && r.satisfied);
    }

    #[test]
    fn procrustes_undoes_a_gauge() {
        let a = haar_isometry(6, 3, &mut stream(6, Domain::Instance, 0));
        let gauge = haar_unitary(3, &mut stream(6, Domain::Instance, 1));
        let a_hat = &a * &gauge;
        let r = check_procrustes_sandwich(&a, &a_hat, &opts()).unwrap();
        assert!(r.satisfied);
        assert!(r.lhs < 1e-12 && r.details["aligned_distance"] < 1e-12);
    }

    #[test]
    fn entrywise_diagonal_shift() {
        let k = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let k_hat = &k + &ComplexMatrix::identity(4).scale_real(0.01);
        let r = check_entrywise_to_spectral(&k, &k_hat, 0.01, &opts()).unwrap();
        assert!(r.satisfied);
        assert!((r.lhs - 0.01).abs() < 1e-15 && (r.rhs - 0.02).abs() < 1e-15);
        assert_eq!(r.details["precondition_met"], 1.0);
    }

    #[test]
    fn entrywise_all_ones_exceeds_sqrt_m() {
        // Every entry has modulus gamma but the norm is m * gamma.
        let k = ComplexMatrix::zeros(4, 4);
        let k_hat = ComplexMatrix::from_fn(4, 4, |_, _| Complex64::new(0.01, 0.0));
        let r = check_entrywise_to_spectral(&k, &k_hat, 0.01, &opts()).unwrap();
        assert!((r.lhs - 0.04).abs() < 1e-15);
        assert!(!r.satisfied);
    }

    #[test]
    fn entrywise_precondition_is_reported() {
        let k = ComplexMatrix::zeros(2, 2);
        let k_hat = ComplexMatrix::from_real_diagonal(&[0.5, 0.0]);
        let r = check_entrywise_to_spectral(&k, &k_hat, 0.1, &opts()).unwrap();
        assert_eq!(r.details["precondition_met"], 0.0);
    }

    #[test]
    fn tv_theorem_boundary() {
        let s = FermionState::from_amplitudes(&complex_necessity_amplitudes()).unwrap();
        let r = check_tv_theorem(&s, &s, 0.0, &opts(), Execution::Sequential).unwrap();
        assert!(r.satisfied && r.lhs == 0.0 && r.rhs == 0.0);
    }

    #[test]
    fn chain_links_hold_on_a_perturbed_pair() {
        let a = haar_isometry(5, 2, &mut stream(7, Domain::Instance, 0));
        let a_hat = perturbed_isometry(&a, 0.05, &mut stream(7, Domain::Perturbation, 0));
        let links = check_variation_chain(&a, &a_hat, &opts()).unwrap();
        assert_eq!(links.len(), 3);
        assert!(links.iter().all(|r| r.satisfied), "{links:?}");
    }

    #[test]
    fn fixture_values() {
        let r = fixture_complex_necessity().unwrap();
        assert!(r.satisfied, "{r:?}");
        assert!((r.details["p2"] - 0.525).abs() < 1e-12);
    }

    #[test]
    fn tv_agrees_with_resummation() {
        let a = haar_isometry(5, 2, &mut stream(8, Domain::Instance, 0));
        let a_hat = perturbed_isometry(&a, 0.1, &mut stream(8, Domain::Perturbation, 0));
        let p = brute_force_distribution(&FermionState::from_amplitudes(&a).unwrap()).unwrap();
        let q = brute_force_distribution(&FermionState::from_amplitudes(&a_hat).unwrap()).unwrap();
        let mut direct = 0.0;
        for c in p.configurations() {
            direct += (p.probability(&c).unwrap() - q.probability(&c).unwrap()).abs();
        }
        assert!((total_variation(&p, &q).unwrap() - direct / 2.0).abs() < 1e-15);
    }

    #[test]
    fn suite_is_policy_independent() {
        let seq = verification_suite(3, 12, &opts(), Execution::Sequential).unwrap();
        let par = verification_suite(3, 12, &opts(), Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 12 * 9);
        let t = tally(&seq);
        for name in ["phi_norm_product", "lifting_lipschitz", "procrustes_sandwich", "variation_chain_tv_to_trace"] {
            assert!(t[name].all_passed(), "{name}: {:?}", t[name]);
        }
    }

    #[test]
    fn report_json_shape() {
        let r = BoundCheckReport::upper_bound("x", 1.0, 2.0, 0.0).with_instance("m=1");
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(v["satisfied"], true);
        assert!(v.get("details").is_none());
    }
}
