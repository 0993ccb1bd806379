//! Exact sampling from the determinantal outcome distribution.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fermion::config::ModeConfiguration;
use crate::fermion::state::FermionState;
use crate::parallel::Execution;
use crate::rng::{stream, Domain};

/// Conditional occupancies this far outside `[0, 1]` mean the kernel is broken.
pub const CONDITIONAL_SLACK: f64 = 1e-8;

/// Samples drawn from one seeded stream in [`sample_batch`].
pub const SAMPLE_CHUNK: usize = 4096;

/// Draws one configuration with probability `det(K_S)`.
///
/// Scans the modes in order. Mode `i` is included with its conditional
/// occupancy given the decisions so far, then the remaining block of the
/// kernel is updated by the Schur complement for that decision:
/// `K - K[:,i] K[i,:] / K_ii` after inclusion and
/// `K - K[:,i] K[i,:] / (K_ii - 1)` after exclusion.
/// Once the remaining modes are forced (all needed, or none) the decision
/// is taken without drawing, so the result always has exactly `n` modes.
pub fn sample_configuration<R: Rng + ?Sized>(state: &FermionState, rng: &mut R) -> Result<ModeConfiguration> {
    let mut work = state.correlation().as_slice().to_vec();
    sample_into(&mut work, state.modes(), state.particles(), rng)
}

fn sample_into<R: Rng + ?Sized>(kern: &mut [Complex64], m: usize, n: usize, rng: &mut R) -> Result<ModeConfiguration> {
    let mut bits = 0u64;
    let mut needed = n;
    for i in 0..m {
        let left = m - i;
        let p = kern[i * m + i].re;
        if !(-CONDITIONAL_SLACK..=1.0 + CONDITIONAL_SLACK).contains(&p) {
            return Err(Error::NumericDegeneracy(format!("conditional occupancy {p:e} of mode {i} outside [0, 1]")));
        }
        let include = if needed == 0 {
            false
        } else if needed == left {
            true
        } else {
            rng.random::<f64>() < p
        };
        if left == 1 {
            if include {
                bits |= 1 << i;
            }
            break;
        }
        let pivot = if include { kern[i * m + i] } else { kern[i * m + i] - 1.0 };
        if pivot.norm() < 1e-300 {
            return Err(Error::NumericDegeneracy(format!("zero pivot while conditioning on mode {i}")));
        }
        for a in i + 1..m {
            let factor = kern[a * m + i] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for b in i + 1..m {
                let upd = factor * kern[i * m + b];
                kern[a * m + b] -= upd;
            }
        }
        if include {
            bits |= 1 << i;
            needed -= 1;
        }
    }
    ModeConfiguration::from_bits(m, bits)
}

/// `count` independent samples. Chunk `c` of [`SAMPLE_CHUNK`] samples draws
/// from stream `(seed, Samples, c)`, so the output is the same under every
/// execution policy.
pub fn sample_batch(state: &FermionState, count: usize, seed: u64, exec: Execution) -> Result<Vec<ModeConfiguration>> {
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let parts = exec.try_map(chunks, |c| {
        let mut rng = stream(seed, Domain::Samples, c as u64);
        let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
        let m = state.modes();
        let mut work = vec![Complex64::new(0.0, 0.0); m * m];
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            work.copy_from_slice(state.correlation().as_slice());
            out.push(sample_into(&mut work, m, state.particles(), &mut rng)?);
        }
        Ok::<_, Error>(out)
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Draws `shots` samples from one stream and returns per-mode occupation counts.
pub fn occupancy_counts<R: Rng + ?Sized>(state: &FermionState, shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    let m = state.modes();
    let mut counts = vec![0u64; m];
    let mut work = vec![Complex64::new(0.0, 0.0); m * m];
    for _ in 0..shots {
        work.copy_from_slice(state.correlation().as_slice());
        let s = sample_into(&mut work, m, state.particles(), rng)?;
        for (i, c) in counts.iter_mut().enumerate() {
            if s.is_occupied(i) {
                *c += 1;
            }
        }
    }
    Ok(counts)
}
