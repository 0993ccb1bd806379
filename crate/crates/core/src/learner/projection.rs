use crate::error::{Error, Result};
use crate::fermion::state::FermionState;
use crate::linalg::{hermitian_eigen, DEFAULT_TOL};
use crate::matrix::ComplexMatrix;

/// Eigenvalue gaps at or below this are reported as ties.
pub const TIE_TOL: f64 = 1e-12;

/// A raw estimate rounded to the nearest valid `n`-fermion state.
#[derive(Debug, Clone)]
pub struct Projection {
    pub state: FermionState,
    /// `m x n` orthonormal columns spanning the kept eigenspace.
    pub amplitudes: ComplexMatrix,
    /// The `n`-th and `(n+1)`-th eigenvalues were within [`TIE_TOL`]; the
    /// eigenvector earlier in the solver's order was kept.
    pub tie: bool,
}

/// Replaces a Hermitian estimate by the projector onto its `n` leading
/// eigenvectors, the closest rank-`n` projector in spectral norm.
pub fn project_to_valid_state(k_hat: &ComplexMatrix, n: usize) -> Result<Projection> {
    if !k_hat.is_square() || n > k_hat.rows() {
        return Err(Error::Dimension(format!(
            "cannot project a {}x{} matrix onto {n}-particle states",
            k_hat.rows(),
            k_hat.cols()
        )));
    }
    let residual = k_hat.hermitian_residual();
    if residual > DEFAULT_TOL {
        return Err(Error::Validation(format!("estimate is not Hermitian: max |K - K^dagger| = {residual:.3e}")));
    }
    let eig = hermitian_eigen(k_hat)?;
    let tie = n > 0 && n < eig.values.len() && (eig.values[n - 1] - eig.values[n]).abs() <= TIE_TOL;
    let amplitudes = eig.vectors.leading_columns(n);
    let state = FermionState::from_amplitudes(&amplitudes)?;
    Ok(Projection { state, amplitudes, tie })
}
