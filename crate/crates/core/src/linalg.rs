//! Determinants, singular values, spectral norms and the structural
//! predicates used to validate correlation matrices.
//!
//! The SVD, Hermitian eigensolver and QR factorization are delegated to
//! `nalgebra`; the determinant is a plain LU elimination so that the phase
//! of every row swap is tracked exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Structural tolerance used when a caller does not pass one.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Thin singular value decomposition `M = left * diag(singular_values) * right^dagger`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub left: ComplexMatrix,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub right: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let scaled = ComplexMatrix::from_fn(self.left.rows(), k, |i, j| self.left[(i, j)] * self.singular_values[j]);
        &scaled * &self.right.adjoint()
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

pub(crate) fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Determinant via LU factorization with partial pivoting.
///
/// The empty (0x0) matrix has determinant 1.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    Ok(determinant_unchecked(m))
}

pub(crate) fn determinant_unchecked(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    let mut a: Vec<Complex64> = m.as_slice().to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1 * n + col].norm().total_cmp(&a[r2 * n + col].norm()))
            .expect("non-empty pivot range");
        let pivot = a[pivot_row * n + col];
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col + 1..n {
                let upper = a[col * n + j];
                a[r * n + j] -= factor * upper;
            }
        }
    }
    det
}

/// Thin SVD with singular values sorted in descending order.
pub fn svd(m: &ComplexMatrix) -> SvdResult {
    let decomposition = to_nalgebra(m).svd(true, true);
    let u = decomposition.u.expect("left vectors requested");
    let v_t = decomposition.v_t.expect("right vectors requested");
    let sv = decomposition.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let left = ComplexMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let right = ComplexMatrix::from_fn(v_t.ncols(), order.len(), |i, j| v_t[(order[j], i)].conj());
    let singular_values = order.iter().map(|&k| sv[k].max(0.0)).collect();
    SvdResult { left, singular_values, right }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = to_nalgebra(m).singular_values().iter().map(|&s| s.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Operator 2-norm: the largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues descending.
///
/// Ties keep the order the solver produced, so the result is deterministic.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let eig = to_nalgebra(&m.hermitian_part()).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of the Hermitian part of `m`, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension("eigenvalues need a square matrix".into()));
    }
    let mut values: Vec<f64> = to_nalgebra(&m.hermitian_part()).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Thin QR factorization, `m = q * r` with `q` column-orthonormal.
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let qr = to_nalgebra(m).qr();
    (from_nalgebra(&qr.q()), from_nalgebra(&qr.r()))
}

/// `max |(U^dagger U - I)_ij|` for square `u`, infinite otherwise.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    u.isometry_residual()
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    unitarity_residual(u) <= tol
}

/// Describes the first way `k` fails to be a rank-`n` Hermitian projector,
/// or `None` when every check passes at `tol`.
pub fn correlation_violation(k: &ComplexMatrix, n: usize, tol: f64) -> Option<String> {
    if !k.is_square() {
        return Some(format!("matrix is {}x{}, not square", k.rows(), k.cols()));
    }
    let m = k.rows();
    if n > m {
        return Some(format!("{n} particles cannot fit in {m} modes"));
    }
    let herm = k.hermitian_residual();
    if herm > tol {
        return Some(format!("not Hermitian: max |K - K^dagger| = {herm:.3e}"));
    }
    let trace = k.trace().re;
    if (trace - n as f64).abs() > tol {
        return Some(format!("trace {trace} differs from particle count {n}"));
    }
    let idem = (&(k * k) - k).max_abs();
    if idem > tol {
        return Some(format!("not a projector: max |K^2 - K| = {idem:.3e}"));
    }
    let eig = hermitian_eigenvalues(k).ok()?;
    if let Some(bad) = eig.iter().find(|&&l| l < -tol || l > 1.0 + tol) {
        return Some(format!("eigenvalue {bad} outside [0, 1]"));
    }
    None
}

/// True iff `k` is Hermitian, has spectrum in `[0, 1]`, is idempotent and has
/// trace `n`, all within `tol`.
pub fn is_valid_correlation(k: &ComplexMatrix, n: usize, tol: f64) -> bool {
    correlation_violation(k, n, tol).is_none()
}
