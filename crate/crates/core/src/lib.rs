//! Simulation, learning and bound verification for non-interacting fermion
//! distributions.
//!
//! An `n`-fermion state over `m` modes is described by its correlation
//! matrix `K`, an `m x m` Hermitian projector of rank `n`. Measuring in the
//! occupation basis yields configuration `S` with probability `det(K_S)`,
//! and a mode unitary `V` maps `K` to `V K V^dagger`.
//!
//! The crate is organized as:
//!
//! - [`matrix`], [`linalg`], [`haar`]: dense complex linear algebra.
//! - [`fermion`]: states, outcome probabilities, the `n`-particle lift and an
//!   exact sampler.
//! - [`learner`]: reconstruction of `K` from one-mode statistics measured in
//!   `O(m)` beamsplitter bases, against any [`learner::MeasurementOracle`].
//! - [`analysis`]: total-variation and trace distances plus numeric checks
//!   of the error bounds that relate `K`-estimates to distribution error.
//! - [`tomography`]: the same scheme applied to `d`-dimensional density matrices.
//!
//! Batch work runs through [`parallel::Execution`]; with the default
//! `parallel` feature it uses rayon, and results never depend on the policy.

pub mod analysis;
pub mod error;
pub mod fermion;
pub mod haar;
pub mod learner;
pub mod linalg;
pub mod matrix;
pub mod parallel;
pub mod rng;
pub mod tomography;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use parallel::Execution;
