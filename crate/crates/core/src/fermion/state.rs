use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::config::ModeConfiguration;
use crate::linalg::{correlation_violation, determinant_unchecked, unitarity_residual, DEFAULT_TOL};
use crate::matrix::{ComplexMatrix, MatrixWire};

/// Minors this close below zero (or above one) are rounding noise and get clamped.
pub const PROBABILITY_ROUNDOFF: f64 = 1e-10;

/// An `n`-fermion state of `m` modes, held as its correlation matrix `K`.
///
/// `K` is the canonical representation: it is what measurements see, while
/// the amplitude matrix `A` with `K = A A^dagger` is only defined up to a
/// right unitary. Construction always validates that `K` is a Hermitian
/// projector with trace `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionState {
    correlation: ComplexMatrix,
    particles: usize,
}

impl FermionState {
    pub fn from_correlation(k: ComplexMatrix, n: usize) -> Result<Self> {
        Self::from_correlation_with_tol(k, n, DEFAULT_TOL)
    }

    pub fn from_correlation_with_tol(k: ComplexMatrix, n: usize, tol: f64) -> Result<Self> {
        if let Some(why) = correlation_violation(&k, n, tol) {
            return Err(Error::Validation(why));
        }
        Ok(Self { correlation: k, particles: n })
    }

    /// State prepared by the column-orthonormal `m x n` matrix `a`.
    pub fn from_amplitudes(a: &ComplexMatrix) -> Result<Self> {
        Self::from_amplitudes_with_tol(a, DEFAULT_TOL)
    }

    pub fn from_amplitudes_with_tol(a: &ComplexMatrix, tol: f64) -> Result<Self> {
        let (m, n) = a.shape();
        if n > m {
            return Err(Error::Dimension(format!(
                "amplitude matrix is {m}x{n}; needs at least as many rows as columns"
            )));
        }
        let gram = &a.adjoint() * a;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                let dev = (gram[(i, j)] - Complex64::new(expected, 0.0)).norm();
                if dev > tol {
                    return Err(Error::Validation(format!(
                        "columns are not orthonormal: Gram entry ({i}, {j}) = {:.6}{:+.6}i, expected {expected}",
                        gram[(i, j)].re,
                        gram[(i, j)].im
                    )));
                }
            }
        }
        Self::from_correlation_with_tol(a * &a.adjoint(), n, tol)
    }

    pub fn modes(&self) -> usize {
        self.correlation.rows()
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn correlation(&self) -> &ComplexMatrix {
        &self.correlation
    }

    pub fn into_correlation(self) -> ComplexMatrix {
        self.correlation
    }

    /// Passes the state through the mode unitary `v`: `K -> V K V^dagger`.
    pub fn apply_mode_unitary(&self, v: &ComplexMatrix) -> Result<Self> {
        self.apply_mode_unitary_with_tol(v, DEFAULT_TOL)
    }

    pub fn apply_mode_unitary_with_tol(&self, v: &ComplexMatrix, tol: f64) -> Result<Self> {
        if v.shape() != (self.modes(), self.modes()) {
            return Err(Error::Dimension(format!(
                "mode unitary is {}x{}, state has {} modes",
                v.rows(),
                v.cols(),
                self.modes()
            )));
        }
        let residual = unitarity_residual(v);
        if residual > tol {
            return Err(Error::Validation(format!(
                "basis change is not unitary: max |V^dagger V - I| = {residual:.3e}"
            )));
        }
        let k = &(v * &self.correlation) * &v.adjoint();
        Ok(Self { correlation: k, particles: self.particles })
    }

    /// `Pr[S] = det(K_S)` for an outcome with exactly `n` occupied modes.
    pub fn outcome_probability(&self, s: &ModeConfiguration) -> Result<f64> {
        self.check_modes(s)?;
        if s.count() != self.particles {
            return Err(Error::Arity { expected: self.particles, found: s.count() });
        }
        clamp_probability(principal_minor(&self.correlation, &s.occupied()))
    }

    /// Probability that every mode in `subset` is occupied: `det(K_T)`.
    /// The empty subset has probability 1.
    pub fn marginal_probability(&self, subset: &ModeConfiguration) -> Result<f64> {
        self.check_modes(subset)?;
        if subset.count() > self.particles {
            return Err(Error::Arity { expected: self.particles, found: subset.count() });
        }
        clamp_probability(principal_minor(&self.correlation, &subset.occupied()))
    }

    fn check_modes(&self, s: &ModeConfiguration) -> Result<()> {
        if s.modes() != self.modes() {
            return Err(Error::Dimension(format!("configuration has {} modes, state has {}", s.modes(), self.modes())));
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&StateFile::from(self)).expect("state serialization cannot fail")
    }

    /// Reads a state file. The matrix may be the `m x m` correlation matrix
    /// or an `m x n` amplitude matrix.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(s)?;
        let (m, n) = (file.m, file.n);
        let matrix = ComplexMatrix::try_from(file.matrix)?;
        if matrix.rows() != m {
            return Err(Error::Dimension(format!("state file declares m = {m} but matrix has {} rows", matrix.rows())));
        }
        if matrix.cols() == m {
            Self::from_correlation(matrix, n)
        } else if matrix.cols() == n {
            Self::from_amplitudes(&matrix)
        } else {
            Err(Error::Dimension(format!(
                "state matrix must be {m}x{m} or {m}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )))
        }
    }
}

/// Determinant of the principal submatrix on `idx`, real part only.
pub(crate) fn principal_minor(k: &ComplexMatrix, idx: &[usize]) -> f64 {
    determinant_unchecked(&k.principal_submatrix(idx)).re
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !(-PROBABILITY_ROUNDOFF..=1.0 + PROBABILITY_ROUNDOFF).contains(&p) {
        return Err(Error::NumericDegeneracy(format!(
            "principal minor {p:e} lies outside [0, 1] for a validated state"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    #[serde(flatten)]
    matrix: MatrixWire,
    m: usize,
    n: usize,
}

impl From<&FermionState> for StateFile {
    fn from(s: &FermionState) -> Self {
        Self { matrix: MatrixWire::from(s.correlation()), m: s.modes(), n: s.particles() }
    }
}
