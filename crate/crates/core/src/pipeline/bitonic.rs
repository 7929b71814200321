//! Explicit bitonic compare-exchange network.

use std::cmp::Ordering;

use crate::channel::{hard_decide_slice, LlrVector};
use crate::decoder::SortResult;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Permutation};
use crate::schedule::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparator {
    pub lo: usize,
    pub hi: usize,
    /// Smaller key ends up at `lo` when set, at `hi` otherwise.
    pub ascending: bool,
}

/// `stages[s][l]` is compare level `l` of merge stage `s`.
#[derive(Clone, Debug)]
pub struct BitonicNetwork {
    n: usize,
    stages: Vec<Vec<Vec<Comparator>>>,
    removed_sets: usize,
    removed_comparators: usize,
}

impl BitonicNetwork {
    /// Builds the network for `n = 2^m` inputs.
    ///
    /// With `pruned`, the final merge stage keeps only its first level on the
    /// upper half: the N/2 largest keys are separated but left unsorted.
    pub fn new(n: usize, pruned: bool) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "bitonic network needs a power-of-two length, got {n}"
            )));
        }
        let mut stages = Vec::new();
        let (mut removed_sets, mut removed_comparators) = (0, 0);
        let mut k = 2;
        while k <= n {
            let last = k == n;
            let mut levels = Vec::new();
            let mut j = k / 2;
            while j >= 1 {
                let mut level = Vec::with_capacity(n / 2);
                let mut dropped = 0;
                for i in 0..n {
                    let l = i ^ j;
                    if l <= i {
                        continue;
                    }
                    if pruned && last && j < n / 2 && i >= n / 2 {
                        dropped += 1;
                        continue;
                    }
                    level.push(Comparator {
                        lo: i,
                        hi: l,
                        ascending: i & k == 0,
                    });
                }
                if dropped > 0 {
                    removed_sets += 1;
                    removed_comparators += dropped;
                }
                levels.push(level);
                j /= 2;
            }
            stages.push(levels);
            k *= 2;
        }
        Ok(BitonicNetwork {
            n,
            stages,
            removed_sets,
            removed_comparators,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Merge stages, `log₂N`.
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[Vec<Vec<Comparator>>] {
        &self.stages
    }

    pub fn comparator_count(&self) -> usize {
        self.stages.iter().flatten().map(Vec::len).sum()
    }

    /// Compare-and-swap sets removed by pruning.
    pub fn removed_sets(&self) -> usize {
        self.removed_sets
    }

    pub fn removed_comparators(&self) -> usize {
        self.removed_comparators
    }

    /// Sorts by `(|LLR|, natural index)`, forwarding index and sign.
    pub fn sort(&self, y: &LlrVector) -> Result<SortResult> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let mags: Vec<f64> = y.values().iter().map(|v| v.abs()).collect();
        let key = |i: usize| (mags[i], i);
        let less = |a: usize, b: usize| {
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1)) == Ordering::Less
        };
        let mut wires: Vec<usize> = (0..self.n).collect();
        for c in self.stages.iter().flatten().flatten() {
            let (a, b) = (wires[c.lo], wires[c.hi]);
            if less(b, a) == c.ascending {
                wires.swap(c.lo, c.hi);
            }
        }
        let hd = hard_decide_slice(y.values());
        let sorted_hd = BitVector::from_bools(wires.iter().map(|&i| hd.get(i)));
        Ok(SortResult {
            perm: Permutation::from_indices_unchecked(wires),
            sorted_hd,
        })
    }
}

pub fn bitonic_sort(values: &LlrVector, pruned: bool) -> Result<SortResult> {
    BitonicNetwork::new(values.len(), pruned)?.sort(values)
}

/// Pruning needs every multi-bit pattern to stay within the lower half.
pub fn check_pruning(schedule: &Schedule, big_n: usize) -> Result<()> {
    match schedule.max_index_with_hw(2) {
        Some(m) if m >= big_n / 2 => Err(Error::PruningRefused(format!(
            "a pattern with Hamming weight >= 2 flips sorted position {m} >= N/2 = {}",
            big_n / 2
        ))),
        _ => Ok(()),
    }
}
