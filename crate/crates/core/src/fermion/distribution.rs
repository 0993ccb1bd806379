use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermion::config::{binomial, configuration_rank, enumerate_configurations, ModeConfiguration};
use crate::fermion::state::{principal_minor, FermionState, PROBABILITY_ROUNDOFF};
use crate::fermion::DEFAULT_CAPACITY;
use crate::matrix::ComplexMatrix;
use crate::parallel::Execution;

/// Values over all `C(m, n)` configurations, stored in canonical order.
///
/// Built from a valid state this is a probability distribution. Built from an
/// arbitrary Hermitian matrix through [`minor_distribution`] it is a signed
/// quasi-distribution: minors are passed through unclamped.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    modes: usize,
    particles: usize,
    values: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn from_values(modes: usize, particles: usize, values: Vec<f64>) -> Result<Self> {
        let expected = binomial(modes, particles);
        if values.len() as u128 != expected {
            return Err(Error::Dimension(format!(
                "{modes} modes with {particles} particles have {expected} outcomes, got {}",
                values.len()
            )));
        }
        Ok(Self { modes, particles, values })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Values in canonical configuration order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn configurations(&self) -> Vec<ModeConfiguration> {
        enumerate_configurations(self.modes, self.particles)
    }

    pub fn probability(&self, s: &ModeConfiguration) -> Result<f64> {
        if s.modes() != self.modes || s.count() != self.particles {
            return Err(Error::Arity { expected: self.particles, found: s.count() });
        }
        Ok(self.values[configuration_rank(s)])
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Writes `bitstring,probability` rows in canonical order, with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            bitstring: String,
            probability: f64,
        }
        let mut writer = csv::Writer::from_writer(w);
        for (c, &p) in self.configurations().iter().zip(&self.values) {
            writer.serialize(Row { bitstring: c.bitstring(), probability: p })?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Exact outcome distribution of `state`: `det(K_S)` for every configuration.
pub fn brute_force_distribution(state: &FermionState) -> Result<OutcomeDistribution> {
    brute_force_distribution_with(state, DEFAULT_CAPACITY, Execution::Sequential)
}

pub fn brute_force_distribution_with(
    state: &FermionState,
    capacity: u128,
    exec: Execution,
) -> Result<OutcomeDistribution> {
    let raw = minor_distribution_with(state.correlation(), state.particles(), capacity, exec)?;
    let mut values = raw.values;
    for (idx, p) in values.iter_mut().enumerate() {
        if *p < -PROBABILITY_ROUNDOFF || *p > 1.0 + PROBABILITY_ROUNDOFF {
            return Err(Error::NumericDegeneracy(format!("outcome {idx} has minor {p:e} outside [0, 1]")));
        }
        *p = p.clamp(0.0, 1.0);
    }
    Ok(OutcomeDistribution { values, ..raw })
}

/// Principal minors of order `n` of an arbitrary square matrix, unclamped.
pub fn minor_distribution(k: &ComplexMatrix, n: usize) -> Result<OutcomeDistribution> {
    minor_distribution_with(k, n, DEFAULT_CAPACITY, Execution::Sequential)
}

pub fn minor_distribution_with(
    k: &ComplexMatrix,
    n: usize,
    capacity: u128,
    exec: Execution,
) -> Result<OutcomeDistribution> {
    if !k.is_square() || n > k.rows() {
        return Err(Error::Dimension(format!(
            "need a square matrix with at least {n} rows, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let m = k.rows();
    let needed = binomial(m, n);
    if needed > capacity {
        return Err(Error::Capacity { needed, limit: capacity });
    }
    let configs = enumerate_configurations(m, n);
    let values = exec.map(configs.len(), |i| principal_minor(k, &configs[i].occupied()));
    Ok(OutcomeDistribution { modes: m, particles: n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::fixtures::complex_necessity_amplitudes;
    use crate::haar::haar_isometry;
    use crate::rng::{stream, Domain};

    #[test]
    fn point_mass() {
        let s = FermionState::from_correlation(ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]), 2).unwrap();
        let d = brute_force_distribution(&s).unwrap();
        assert_eq!(d.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fixture_pair_probabilities() {
        let s = FermionState::from_amplitudes(&complex_necessity_amplitudes()).unwrap();
        let d = brute_force_distribution(&s).unwrap();
        for occ in [[0, 1], [0, 2], [1, 2]] {
            let p = d.probability(&ModeConfiguration::new(4, &occ).unwrap()).unwrap();
            assert!((p - 0.1).abs() < 1e-12);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_state_normalizes() {
        let a = haar_isometry(8, 4, &mut stream(3, Domain::Instance, 0));
        let s = FermionState::from_amplitudes(&a).unwrap();
        let d = brute_force_distribution(&s).unwrap();
        assert_eq!(d.len(), 70);
        assert!((d.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn capacity_guard() {
        let s = FermionState::from_correlation(ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]), 2).unwrap();
        assert!(matches!(
            brute_force_distribution_with(&s, 5, Execution::Sequential),
            Err(Error::Capacity { needed: 6, limit: 5 })
        ));
    }

    #[test]
    fn signed_minors_pass_through() {
        let k = ComplexMatrix::from_real_rows(&[vec![0.2, 0.9], vec![0.9, 0.3]]).unwrap();
        let d = minor_distribution(&k, 2).unwrap();
        assert!((d.values()[0] - (0.06 - 0.81)).abs() < 1e-15);
    }

    #[test]
    fn csv_dump_in_canonical_order() {
        let s = FermionState::from_correlation(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]), 1).unwrap();
        let mut buf = Vec::new();
        brute_force_distribution(&s).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "bitstring,probability\n100,1.0\n010,0.0\n001,0.0\n");
    }
}
