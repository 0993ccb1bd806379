//! Occupation patterns and their canonical enumeration.

use std::fmt;

use crate::error::{Error, Result};

/// Largest mode count a [`ModeConfiguration`] can represent.
pub const MAX_MODES: usize = 64;

/// Which of `modes` single-particle modes are occupied.
///
/// Mode indices are 0-based. Bit `i` of the pattern is set when mode `i` is
/// occupied.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeConfiguration {
    modes: usize,
    bits: u64,
}

impl ModeConfiguration {
    pub fn new(modes: usize, occupied: &[usize]) -> Result<Self> {
        check_modes(modes)?;
        let mut bits = 0u64;
        for &i in occupied {
            if i >= modes {
                return Err(Error::Index(format!("mode {i} out of range for {modes} modes")));
            }
            if bits & (1 << i) != 0 {
                return Err(Error::Index(format!("mode {i} listed twice")));
            }
            bits |= 1 << i;
        }
        Ok(Self { modes, bits })
    }

    pub fn from_bits(modes: usize, bits: u64) -> Result<Self> {
        check_modes(modes)?;
        if modes < 64 && bits >> modes != 0 {
            return Err(Error::Index(format!("bit pattern {bits:#b} wider than {modes} modes")));
        }
        Ok(Self { modes, bits })
    }

    /// Parses `s_1 s_2 ... s_m` written as `'0'`/`'1'` characters.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut occupied = Vec::new();
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => occupied.push(i),
                '0' => {}
                other => return Err(Error::Index(format!("invalid occupation character {other:?}"))),
            }
        }
        Self::new(s.chars().count(), &occupied)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of occupied modes.
    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        mode < self.modes && self.bits & (1 << mode) != 0
    }

    /// Occupied mode indices in increasing order.
    pub fn occupied(&self) -> Vec<usize> {
        (0..self.modes).filter(|&i| self.is_occupied(i)).collect()
    }

    /// `s_1 ... s_m` as a string of `'0'`/`'1'`, mode 0 first.
    pub fn bitstring(&self) -> String {
        (0..self.modes).map(|i| if self.is_occupied(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for ModeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModeConfiguration({})", self.bitstring())
    }
}

impl fmt::Display for ModeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::Domain(format!("mode count must be in 1..={MAX_MODES}, got {modes}")));
    }
    Ok(())
}

/// Binomial coefficient in `u128`, saturating on overflow.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All `C(m, n)` configurations of `n` particles in `m` modes.
///
/// Canonical order: lexicographic on the sorted list of occupied indices,
/// so `(3, 1)` yields `{0}, {1}, {2}` and `(4, 2)` starts `{0,1}, {0,2}`.
/// Every distribution, lifted matrix and file output uses this order.
pub fn enumerate_configurations(m: usize, n: usize) -> Vec<ModeConfiguration> {
    assert!(n <= m, "cannot place {n} particles in {m} modes");
    assert!((1..=MAX_MODES).contains(&m), "mode count out of range");
    let total = usize::try_from(binomial(m, n)).expect("configuration count fits in memory");
    let mut out = Vec::with_capacity(total);
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let bits = idx.iter().fold(0u64, |b, &i| b | (1 << i));
        out.push(ModeConfiguration { modes: m, bits });
        // Advance to the next combination.
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < m - n + pos {
                idx[pos] += 1;
                for q in pos + 1..n {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of `config` in [`enumerate_configurations`] order.
pub fn configuration_rank(config: &ModeConfiguration) -> usize {
    let m = config.modes();
    let occ = config.occupied();
    let n = occ.len();
    let mut rank: u128 = 0;
    let mut start = 0;
    for (slot, &c) in occ.iter().enumerate() {
        for v in start..c {
            rank += binomial(m - v - 1, n - slot - 1);
        }
        start = c + 1;
    }
    rank as usize
}
