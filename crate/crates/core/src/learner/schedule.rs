use serde::Serialize;

use crate::error::{Error, Result};

/// Rounds of disjoint mode pairs that together contain every unordered pair
/// exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingSchedule {
    modes: usize,
    rounds: Vec<Vec<(usize, usize)>>,
}

impl MatchingSchedule {
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Each round's pairs `(i, j)` with `i < j`, sorted.
    pub fn rounds(&self) -> &[Vec<(usize, usize)>] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rounds.iter().flatten().copied()
    }
}

/// Circle-method 1-factorization of the complete graph on `m` modes.
///
/// Even `m` gives `m - 1` perfect matchings. Odd `m` adds a phantom mode and
/// drops its pairs, giving `m` rounds in each of which one mode sits out.
pub fn round_robin_matchings(m: usize) -> Result<MatchingSchedule> {
    if m < 2 {
        return Err(Error::Domain(format!("a matching schedule needs at least 2 modes, got {m}")));
    }
    let padded = if m.is_multiple_of(2) { m } else { m + 1 };
    let ring = padded - 1;
    let fixed = padded - 1;
    let mut rounds = Vec::with_capacity(ring);
    for r in 0..ring {
        let mut pairs = Vec::with_capacity(padded / 2);
        let mut push = |a: usize, b: usize| {
            if a < m && b < m {
                pairs.push((a.min(b), a.max(b)));
            }
        };
        push(fixed, r);
        for k in 1..padded / 2 {
            push((r + k) % ring, (r + ring - k) % ring);
        }
        pairs.sort_unstable();
        rounds.push(pairs);
    }
    Ok(MatchingSchedule { modes: m, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn check_cover(s: &MatchingSchedule) {
        let m = s.modes();
        let mut seen = BTreeSet::new();
        for round in s.rounds() {
            let mut used = BTreeSet::new();
            for &(i, j) in round {
                assert!(i < j && j < m);
                assert!(used.insert(i) && used.insert(j), "round reuses a mode");
                assert!(seen.insert((i, j)), "pair ({i}, {j}) repeated");
            }
            let expected = if m.is_multiple_of(2) { m } else { m - 1 };
            assert_eq!(used.len(), expected);
        }
        assert_eq!(seen.len(), m * (m - 1) / 2);
        assert_eq!(s.len(), if m.is_multiple_of(2) { m - 1 } else { m });
    }

    #[test]
    fn four_modes() {
        let s = round_robin_matchings(4).unwrap();
        let mut rounds: Vec<Vec<(usize, usize)>> = s.rounds().to_vec();
        rounds.sort();
        assert_eq!(rounds, vec![vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]]);
    }

    #[test]
    fn five_and_two_modes() {
        let s = round_robin_matchings(5).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.rounds().iter().all(|r| r.len() == 2));
        check_cover(&s);
        assert_eq!(round_robin_matchings(2).unwrap().rounds(), &[vec![(0, 1)]]);
    }

    #[test]
    fn every_size_up_to_32_covers_each_pair_once() {
        for m in 2..=32 {
            check_cover(&round_robin_matchings(m).unwrap());
        }
    }

    #[test]
    fn too_few_modes() {
        assert!(matches!(round_robin_matchings(1), Err(Error::Domain(_))));
    }
}
