//! Reference states with hand-checkable statistics.

use num_complex::Complex64;

use crate::matrix::ComplexMatrix;

/// A two-fermion, four-mode amplitude matrix whose one- and two-mode
/// correlations (`p_1 = 1/4`, `p_2 = p_3 = 21/40`, `p_12 = p_13 = p_23 = 1/10`)
/// cannot be reproduced by any real amplitude matrix.
pub fn complex_necessity_amplitudes() -> ComplexMatrix {
    let r2 = 2f64.sqrt();
    let r10 = 10f64.sqrt();
    let c = Complex64::new;
    let rows = vec![
        vec![c(0.5, 0.0), c(0.0, 0.0)],
        vec![c(1.0 / (2.0 * r2), 0.0), c((0.4f64).sqrt(), 0.0)],
        vec![c(1.0 / (2.0 * r2), 0.0), c(0.0, (0.4f64).sqrt())],
        vec![c(1.0 / r2, 0.0), c(-1.0 / r10, -1.0 / r10)],
    ];
    ComplexMatrix::from_rows(&rows).expect("fixture is well formed")
}
