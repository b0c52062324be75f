//! Exact minimax number of tests `M(d, n)` when `d` is known, by game-tree
//! search over families of candidate defective sets.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::enumerate::{choose, masks_from};
use crate::error::{Error, Result};

/// Families are `u128` bitsets over the candidate list.
pub const HARD_CANDIDATE_CAP: u64 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimaxLimits {
    pub max_n: usize,
    pub max_candidates: u64,
}

impl Default for MinimaxLimits {
    fn default() -> Self {
        MinimaxLimits {
            max_n: 8,
            max_candidates: 70,
        }
    }
}

/// Candidate defective sets still consistent with the answers so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinimaxState {
    /// Bit `i` set when candidate `i` is still possible.
    pub candidates: u128,
}

impl MinimaxState {
    pub fn len(&self) -> u32 {
        self.candidates.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates == 0
    }

    pub fn is_terminal(&self) -> bool {
        self.len() == 1
    }

    /// Memo key. Candidates are indexed over one fixed list, so the family
    /// itself is canonical; relabelings of the items are not merged.
    pub fn canonical_key(&self) -> u128 {
        self.candidates
    }
}

struct Solver {
    /// `incidence[item]`: candidates containing the item.
    incidence: Vec<u128>,
    /// Per family: largest budget known to fail, smallest known to succeed.
    memo: HashMap<u128, (u32, u32)>,
}

fn ceil_log2(x: u32) -> u32 {
    if x <= 1 {
        0
    } else {
        32 - (x - 1).leading_zeros()
    }
}

impl Solver {
    /// Distinct nontrivial answers "contaminated" can single out.
    fn splits(&self, family: u128) -> Vec<u128> {
        // items with equal incidence on the family are interchangeable, and
        // a pool only matters through which groups it touches
        let mut groups: Vec<u128> = self
            .incidence
            .iter()
            .map(|inc| inc & family)
            .filter(|&g| g != 0 && g != family)
            .collect();
        groups.sort_unstable();
        groups.dedup();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for sel in 1u32..(1 << groups.len()) {
            let hit = groups
                .iter()
                .enumerate()
                .filter(|(i, _)| sel >> i & 1 == 1)
                .fold(0u128, |acc, (_, g)| acc | g);
            if hit != family && seen.insert(hit) {
                out.push(hit);
            }
        }
        out
    }

    /// Can every candidate of `family` be told apart with `budget` tests?
    fn solvable(&mut self, family: u128, budget: u32) -> bool {
        let size = family.count_ones();
        if size <= 1 {
            return true;
        }
        if budget < ceil_log2(size) {
            return false;
        }
        let (failed, solved) = self.memo.get(&family).copied().unwrap_or((0, u32::MAX));
        if budget >= solved {
            return true;
        }
        if budget <= failed && failed > 0 {
            return false;
        }
        let half = 1u128 << (budget - 1).min(127);
        let mut splits = self.splits(family);
        splits.retain(|&hit| {
            let pure = family & !hit;
            (hit.count_ones() as u128) <= half && (pure.count_ones() as u128) <= half
        });
        // most balanced first
        splits.sort_by_key(|&hit| {
            let a = hit.count_ones();
            (a.max(size - a), hit)
        });
        let ok = splits.into_iter().any(|hit| {
            let pure = family & !hit;
            let (big, small) = if hit.count_ones() >= pure.count_ones() {
                (hit, pure)
            } else {
                (pure, hit)
            };
            self.solvable(big, budget - 1) && self.solvable(small, budget - 1)
        });
        let entry = self.memo.entry(family).or_insert((0, u32::MAX));
        if ok {
            entry.1 = entry.1.min(budget);
        } else {
            entry.0 = entry.0.max(budget);
        }
        ok
    }

    fn value(&mut self, family: u128) -> u32 {
        let mut t = ceil_log2(family.count_ones());
        while !self.solvable(family, t) {
            t += 1;
        }
        t
    }
}

/// Fewest tests that identify any `d` defectives among `n` items in the
/// worst case, `d` known in advance.
pub fn minimax_m(n: usize, d: usize, limits: MinimaxLimits) -> Result<u32> {
    if d > n {
        return Err(Error::Usage(format!("d = {d} exceeds n = {n}")));
    }
    if n > limits.max_n {
        return Err(Error::LimitExceeded(format!(
            "n = {n} exceeds the oracle limit {}",
            limits.max_n
        )));
    }
    let count = choose(n, d);
    let cap = limits.max_candidates.min(HARD_CANDIDATE_CAP);
    if count > cap {
        return Err(Error::LimitExceeded(format!(
            "C({n}, {d}) = {count} candidates exceed the oracle limit {cap}"
        )));
    }
    let masks: Vec<u64> = masks_from(n, d, 0, count)?.collect();
    let incidence = (0..n)
        .map(|item| {
            masks
                .iter()
                .enumerate()
                .filter(|(_, m)| *m >> item & 1 == 1)
                .fold(0u128, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let full = if count == 128 {
        u128::MAX
    } else {
        (1u128 << count) - 1
    };
    let mut solver = Solver {
        incidence,
        memo: HashMap::new(),
    };
    Ok(solver.value(full))
}
