use crate::error::{Error, Result};

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

/// Number of one-mode occupancy statistics that must be accurate at once:
/// `m` diagonals plus two rotated diagonals for each of the `m - 1` partners
/// of every mode, `m * (2(m - 1) + 1)`.
pub fn statistic_count(m: usize) -> u64 {
    let m = m as u64;
    m * (2 * m.saturating_sub(1) + 1)
}

/// Shots per measurement basis so that, with probability at least
/// `1 - delta`, every occupancy statistic is within `gamma / 4` of its mean.
///
/// Hoeffding with a union bound over [`statistic_count`] estimates:
/// `ceil( ln(2Q / delta) / (2 (gamma / 4)^2) )`. An entry of `K` combines
/// four statistics, so its real and imaginary parts are then within
/// `gamma / 2` and its modulus within `gamma`.
pub fn shots_per_basis(gamma: f64, delta: f64, m: usize) -> Result<u64> {
    check_unit_interval("gamma", gamma)?;
    check_unit_interval("delta", delta)?;
    if m == 0 {
        return Err(Error::Domain("mode count must be positive".into()));
    }
    let q = statistic_count(m) as f64;
    let per_stat = gamma / 4.0;
    let n = ((2.0 * q / delta).ln() / (2.0 * per_stat * per_stat)).ceil();
    Ok(n.max(1.0) as u64)
}

/// Per-entry accuracy that makes the learned distribution `epsilon`-close in
/// total variation: `epsilon / (2 n sqrt(m))`.
pub fn epsilon_to_gamma(epsilon: f64, m: usize, n: usize) -> Result<f64> {
    check_unit_interval("epsilon", epsilon)?;
    if m == 0 || n == 0 {
        return Err(Error::Domain(format!("need positive m and n, got m = {m}, n = {n}")));
    }
    Ok(epsilon / (2.0 * n as f64 * (m as f64).sqrt()))
}

/// Accuracy target and the shot budget it implies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EstimationBudget {
    pub gamma: f64,
    pub delta: f64,
    pub shots_per_basis: u64,
    pub bases_used: u64,
}

impl EstimationBudget {
    /// `bases_used` is one standard basis plus two per schedule round.
    pub fn new(gamma: f64, delta: f64, m: usize, rounds: usize) -> Result<Self> {
        Ok(Self { gamma, delta, shots_per_basis: shots_per_basis(gamma, delta, m)?, bases_used: 1 + 2 * rounds as u64 })
    }

    pub fn shots_total(&self) -> u64 {
        self.shots_per_basis * self.bases_used
    }
}
