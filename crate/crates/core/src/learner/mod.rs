//! Learning the correlation matrix from measurements in matching bases.

pub mod budget;
pub mod oracle;
pub mod projection;
pub mod reconstruct;
pub mod schedule;

pub use budget::{epsilon_to_gamma, shots_per_basis, statistic_count, EstimationBudget};
pub use oracle::{ExactOracle, MeasurementOracle, SamplingBackend, SimulatedOracle};
pub use projection::{project_to_valid_state, Projection};
pub use reconstruct::{
    basis_stream, estimate_diagonals, estimate_pair_statistics, reconstruct, reconstruct_with, reconstruct_with_shots,
    solve_entry, PairStatistics, ReconstructionReport, ReconstructionResult, StatisticId, STANDARD_STREAM,
};
pub use schedule::{round_robin_matchings, MatchingSchedule};
