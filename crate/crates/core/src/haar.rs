//! Haar-distributed random unitaries.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::qr;
use crate::matrix::ComplexMatrix;

/// Draws an `m x m` unitary from the Haar measure.
///
/// Takes the QR factorization of a matrix of i.i.d. standard complex
/// Gaussians and multiplies each column of `Q` by the phase of the matching
/// diagonal entry of `R`, which removes the bias of the factorization's
/// sign convention.
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ComplexMatrix {
    assert!(m >= 1, "unitary dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let gauss = ComplexMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let (q, r) = qr(&gauss);
    let phases: Vec<Complex64> = (0..m)
        .map(|j| {
            let d = r[(j, j)];
            let norm = d.norm();
            if norm == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                d / norm
            }
        })
        .collect();
    ComplexMatrix::from_fn(m, m, |i, j| q[(i, j)] * phases[j])
}

/// First `n` columns of a Haar unitary: a uniformly random `m x n` isometry.
pub fn haar_isometry<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n <= m, "isometry needs n <= m");
    haar_unitary(m, rng).leading_columns(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use crate::rng::{stream, Domain};

    #[test]
    fn one_by_one_is_a_phase() {
        let u = haar_unitary(1, &mut stream(1, Domain::Instance, 0));
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let a = haar_unitary(4, &mut stream(42, Domain::Instance, 0));
        let b = haar_unitary(4, &mut stream(42, Domain::Instance, 0));
        let c = haar_unitary(4, &mut stream(43, Domain::Instance, 0));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn columns_are_orthonormal() {
        let u = haar_unitary(5, &mut stream(5, Domain::Instance, 0));
        // Gram matrix computed entry by entry from the columns.
        for i in 0..5 {
            for j in 0..5 {
                let dot: Complex64 = (0..5).map(|r| u[(r, i)].conj() * u[(r, j)]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - Complex64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
        assert!(unitarity_residual(&u) < 1e-10);
    }
}
