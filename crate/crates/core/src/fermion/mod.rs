//! Non-interacting fermion states: configurations, correlation matrices,
//! mode unitaries, the `n`-particle lift and exact sampling.

pub mod config;
pub mod distribution;
pub mod fixtures;
pub mod gates;
pub mod lift;
pub mod sampler;
pub mod state;

/// Largest number of outcomes (or lifted entries) enumerated by default.
pub const DEFAULT_CAPACITY: u128 = 1_000_000;

pub use config::{binomial, configuration_rank, enumerate_configurations, ModeConfiguration};
pub use distribution::{
    brute_force_distribution, brute_force_distribution_with, minor_distribution, OutcomeDistribution,
};
pub use gates::{beamsplitter, beamsplitter_imag, beamsplitter_real, matching_basis, phaseshifter, Rotation};
pub use lift::{lift_phi, lift_phi_with_capacity};
pub use sampler::{occupancy_counts, sample_batch, sample_configuration};
pub use state::FermionState;
