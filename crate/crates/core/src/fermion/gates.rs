//! Mode unitaries: two-mode beamsplitters, single-mode phase shifters and the
//! block-diagonal bases that apply one beamsplitter to every pair of a
//! matching at once.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// The two beamsplitters of the learning protocol.
///
/// `Real` is `(1/sqrt 2) [[1, 1], [1, -1]]`; on a pair `(i, j)` it moves
/// `(k_ii + k_jj + 2 Re k_ij) / 2` onto the diagonal at `i`.
/// `Imag` is `(1/sqrt 2) [[1, i], [1, -i]]`; it moves
/// `(k_ii + k_jj + 2 Im k_ij) / 2` there instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Real,
    Imag,
}

impl Rotation {
    pub const ALL: [Rotation; 2] = [Rotation::Real, Rotation::Imag];

    /// The 2x2 block as `[[a, b], [c, d]]`.
    pub fn block(self) -> [[Complex64; 2]; 2] {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let i = Complex64::new(0.0, FRAC_1_SQRT_2);
        match self {
            Rotation::Real => [[s, s], [s, -s]],
            Rotation::Imag => [[s, i], [s, -i]],
        }
    }
}

fn check_pair(m: usize, i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(Error::Index(format!("beamsplitter needs two distinct modes, got {i} twice")));
    }
    if i >= m || j >= m {
        return Err(Error::Index(format!("pair ({i}, {j}) out of range for {m} modes")));
    }
    Ok(())
}

fn embed(out: &mut ComplexMatrix, i: usize, j: usize, block: [[Complex64; 2]; 2]) {
    out[(i, i)] = block[0][0];
    out[(i, j)] = block[0][1];
    out[(j, i)] = block[1][0];
    out[(j, j)] = block[1][1];
}

/// `m x m` identity with the rotation's block on rows/columns `(i, j)`.
pub fn beamsplitter(m: usize, i: usize, j: usize, rotation: Rotation) -> Result<ComplexMatrix> {
    check_pair(m, i, j)?;
    let mut out = ComplexMatrix::identity(m);
    embed(&mut out, i, j, rotation.block());
    Ok(out)
}

pub fn beamsplitter_real(m: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    beamsplitter(m, i, j, Rotation::Real)
}

pub fn beamsplitter_imag(m: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    beamsplitter(m, i, j, Rotation::Imag)
}

/// `m x m` identity with `e^{i theta}` at `(i, i)`.
pub fn phaseshifter(m: usize, i: usize, theta: f64) -> Result<ComplexMatrix> {
    if i >= m {
        return Err(Error::Index(format!("mode {i} out of range for {m} modes")));
    }
    let mut out = ComplexMatrix::identity(m);
    out[(i, i)] = Complex64::from_polar(1.0, theta);
    Ok(out)
}

/// Applies `rotation` to every pair simultaneously. Modes outside the pairs
/// are left alone. Pairs must be disjoint.
pub fn matching_basis(m: usize, pairs: &[(usize, usize)], rotation: Rotation) -> Result<ComplexMatrix> {
    let mut used = vec![false; m];
    let mut out = ComplexMatrix::identity(m);
    for &(i, j) in pairs {
        check_pair(m, i, j)?;
        if used[i] || used[j] {
            return Err(Error::Index(format!("pair ({i}, {j}) overlaps another pair")));
        }
        used[i] = true;
        used[j] = true;
        embed(&mut out, i, j, rotation.block());
    }
    Ok(out)
}
