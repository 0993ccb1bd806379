//! The lift of a mode matrix to the `n`-particle space: the matrix of all
//! `n x n` minors.

use crate::error::{Error, Result};
use crate::fermion::config::{binomial, enumerate_configurations};
use crate::fermion::DEFAULT_CAPACITY;
use crate::linalg::determinant_unchecked;
use crate::matrix::ComplexMatrix;

/// `C(a, n) x C(b, n)` matrix whose `(S, T)` entry is `det(X_{S,T})`, rows
/// and columns in canonical configuration order.
///
/// For an `m x n` column-orthonormal `A` the result is a single column: the
/// amplitudes of the prepared state.
pub fn lift_phi(x: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    lift_phi_with_capacity(x, n, DEFAULT_CAPACITY)
}

pub fn lift_phi_with_capacity(x: &ComplexMatrix, n: usize, capacity: u128) -> Result<ComplexMatrix> {
    let (a, b) = x.shape();
    if n > a.min(b) {
        return Err(Error::Dimension(format!("cannot take {n}x{n} minors of a {a}x{b} matrix")));
    }
    let needed = binomial(a, n).saturating_mul(binomial(b, n));
    if needed > capacity {
        return Err(Error::Capacity { needed, limit: capacity });
    }
    let row_sets: Vec<Vec<usize>> = enumerate_configurations(a, n).iter().map(|c| c.occupied()).collect();
    let col_sets: Vec<Vec<usize>> = enumerate_configurations(b, n).iter().map(|c| c.occupied()).collect();
    Ok(ComplexMatrix::from_fn(row_sets.len(), col_sets.len(), |s, t| {
        determinant_unchecked(&x.submatrix(&row_sets[s], &col_sets[t]))
    }))
}
