//! ORBGRAND/GRAND decoding with abandonment, and brute-force oracles.
//!
//! The decoder sorts the LLRs by ascending magnitude, tests the hard decision
//! itself as query 1, then applies scheduled patterns to the sorted hard
//! decision and tests them against the column-permuted parity matrix.

use std::borrow::Borrow;
use std::cmp::Ordering;

use crate::channel::{hard_decide_slice, LlrVector};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVector, ColumnTable, Permutation};
use crate::schedule::{BestFirst, ErrorPattern, PatternOrder, Schedule, ScheduleKind};

/// Reliability order of a received frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortResult {
    /// Position `i` of the sorted vector is natural position `perm[i]`.
    pub perm: Permutation,
    /// `π(HD(y))`.
    pub sorted_hd: BitVector,
}

impl SortResult {
    pub fn from_permutation(perm: Permutation, hd: &BitVector) -> Result<Self> {
        let sorted_hd = perm.apply(hd)?;
        Ok(SortResult { perm, sorted_hd })
    }
}

/// Stable ascending sort of positions by `|LLR|`.
pub fn sort_reliability(y: &LlrVector) -> SortResult {
    let v = y.values();
    // The bit patterns of non-negative floats order like the floats; the
    // index makes every key unique, so an unstable sort is stable here.
    let mut keys: Vec<u128> = v
        .iter()
        .enumerate()
        .map(|(i, x)| u128::from(x.abs().to_bits()) << 32 | i as u128)
        .collect();
    keys.sort_unstable();
    let idx: Vec<usize> = keys.iter().map(|&k| k as u32 as usize).collect();
    let hd = hard_decide_slice(v);
    let sorted_hd = BitVector::from_bools(idx.iter().map(|&i| hd.get(i)));
    SortResult {
        perm: Permutation::from_indices_unchecked(idx),
        sorted_hd,
    }
}

/// Outcome of decoding one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    /// Natural-order output; the hard decision when decoding failed.
    pub codeword: BitVector,
    pub valid: bool,
    /// Codebook queries spent, counting the hard-decision test.
    pub queries: usize,
    /// Winning pattern on sorted positions; empty if the hard decision was valid.
    pub error_pattern: ErrorPattern,
    /// Schedule index of the winning pattern.
    pub pattern_index: Option<usize>,
    /// Decoding abandoned because the schedule ran out before `q_max`.
    pub schedule_exhausted: bool,
}

impl DecodeResult {
    pub fn is_correct(&self, transmitted: &BitVector) -> bool {
        self.valid && &self.codeword == transmitted
    }

    pub fn bit_errors(&self, transmitted: &BitVector) -> usize {
        self.codeword
            .xor(transmitted)
            .map(|d| d.weight())
            .unwrap_or(transmitted.len())
    }
}

/// Decoder for a fixed parity-check matrix.
#[derive(Clone, Debug)]
pub struct Decoder {
    n: usize,
    columns: ColumnTable,
}

impl Decoder {
    pub fn new(parity: &BinaryMatrix) -> Self {
        Decoder {
            n: parity.cols(),
            columns: parity.column_table(),
        }
    }

    pub fn for_code(code: &LinearCode) -> Self {
        Self::new(code.parity())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Query 1 alone: whether `HD(y)` is a codeword.
    pub fn hard_decision_is_codeword(&self, hd: &BitVector) -> bool {
        let mut s = vec![0u64; self.columns.words()];
        self.columns.syndrome_into(hd, &mut s);
        s.iter().all(|&w| w == 0)
    }

    /// Decodes `y` with the given schedule, spending at most `q_max` queries.
    pub fn decode(&self, y: &LlrVector, schedule: &Schedule, q_max: usize) -> Result<DecodeResult> {
        if schedule.n() > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: schedule.n(),
            });
        }
        self.decode_with(y, schedule.iter(), q_max)
    }

    /// Decodes with patterns drawn from any source, in order.
    pub fn decode_with<I>(&self, y: &LlrVector, patterns: I, q_max: usize) -> Result<DecodeResult>
    where
        I: IntoIterator,
        I::Item: Borrow<ErrorPattern>,
    {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let sort = sort_reliability(y);
        let hd = hard_decide_slice(y.values());
        self.decode_sorted(&hd, &sort, patterns, q_max)
    }

    /// The query loop given a precomputed hard decision and reliability order.
    pub fn decode_sorted<I>(
        &self,
        hd: &BitVector,
        sort: &SortResult,
        patterns: I,
        q_max: usize,
    ) -> Result<DecodeResult>
    where
        I: IntoIterator,
        I::Item: Borrow<ErrorPattern>,
    {
        if q_max == 0 {
            return Err(Error::InvalidParameter("q_max must be at least 1".into()));
        }
        if hd.len() != self.n || sort.perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: hd.len().min(sort.perm.len()),
            });
        }
        let words = self.columns.words();
        let mut syndrome = vec![0u64; words];
        // Query 1: the hard decision in natural order.
        self.columns.syndrome_into(hd, &mut syndrome);
        if syndrome.iter().all(|&w| w == 0) {
            return Ok(DecodeResult {
                codeword: hd.clone(),
                valid: true,
                queries: 1,
                error_pattern: ErrorPattern::empty(),
                pattern_index: None,
                schedule_exhausted: false,
            });
        }
        let budget = q_max - 1;
        if budget == 0 {
            return Ok(self.abandoned(hd, 1, false));
        }
        // π(H) · π(HD)ᵀ equals H · HDᵀ; each pattern XORs permuted columns onto it.
        let permuted = self.columns.permuted(&sort.perm);
        let base = syndrome.clone();
        let mut tried = 0usize;
        for (j, p) in patterns.into_iter().take(budget).enumerate() {
            let p = p.borrow();
            tried += 1;
            if p.max_index().is_some_and(|m| m >= self.n) {
                return Err(Error::InvalidPattern(format!(
                    "pattern {p:?} exceeds length {}",
                    self.n
                )));
            }
            let hit = if words == 1 {
                let mut s = base[0];
                for &i in p.indices() {
                    s ^= permuted.column(usize::from(i))[0];
                }
                s == 0
            } else {
                syndrome.copy_from_slice(&base);
                for &i in p.indices() {
                    for (a, b) in syndrome.iter_mut().zip(permuted.column(usize::from(i))) {
                        *a ^= b;
                    }
                }
                syndrome.iter().all(|&w| w == 0)
            };
            if hit {
                let mut z = sort.sorted_hd.clone();
                for &i in p.indices() {
                    z.flip(usize::from(i));
                }
                let codeword = sort.perm.apply_inverse(&z)?;
                return Ok(DecodeResult {
                    codeword,
                    valid: true,
                    queries: j + 2,
                    error_pattern: p.clone(),
                    pattern_index: Some(j),
                    schedule_exhausted: false,
                });
            }
        }
        Ok(self.abandoned(hd, 1 + tried, tried < budget))
    }

    fn abandoned(&self, hd: &BitVector, queries: usize, exhausted: bool) -> DecodeResult {
        DecodeResult {
            codeword: hd.clone(),
            valid: false,
            queries,
            error_pattern: ErrorPattern::empty(),
            pattern_index: None,
            schedule_exhausted: exhausted,
        }
    }
}

/// Decodes one frame of `code`.
pub fn decode(code: &LinearCode, y: &LlrVector, schedule: &Schedule, q_max: usize) -> Result<DecodeResult> {
    Decoder::for_code(code).decode(y, schedule, q_max)
}

/// Decoding by full syndrome recomputation against the materialized `π(H)`.
///
/// Slow; defines the contract that [`Decoder`] must meet bit-exactly.
pub fn decode_reference(
    parity: &BinaryMatrix,
    y: &LlrVector,
    schedule: &Schedule,
    q_max: usize,
) -> Result<DecodeResult> {
    let n = parity.cols();
    let hd = hard_decide_slice(y.values());
    if crate::gf2::is_codeword(parity, &hd)? {
        return Ok(DecodeResult {
            codeword: hd,
            valid: true,
            queries: 1,
            error_pattern: ErrorPattern::empty(),
            pattern_index: None,
            schedule_exhausted: false,
        });
    }
    let sort = sort_reliability(y);
    let permuted_h = parity.permute_columns(&sort.perm)?;
    let budget = q_max.saturating_sub(1);
    let mut tried = 0;
    for (j, p) in schedule.iter().take(budget).enumerate() {
        tried += 1;
        let e = BitVector::from_positions(n, &p.to_vec())?;
        let z = sort.sorted_hd.xor(&e)?;
        if permuted_h.mul_vec(&z)?.is_zero() {
            return Ok(DecodeResult {
                codeword: sort.perm.apply_inverse(&z)?,
                valid: true,
                queries: j + 2,
                error_pattern: p.clone(),
                pattern_index: Some(j),
                schedule_exhausted: false,
            });
        }
    }
    Ok(DecodeResult {
        codeword: hd,
        valid: false,
        queries: 1 + tried,
        error_pattern: ErrorPattern::empty(),
        pattern_index: None,
        schedule_exhausted: tried < budget,
    })
}

fn lex_cmp(a: &BitVector, b: &BitVector) -> Ordering {
    a.iter().cmp(b.iter())
}

/// Maximum-likelihood decision by enumerating all `2^k` codewords.
///
/// Minimizes the summed `|LLR|` over positions that disagree with the hard
/// decision; ties go to the lexicographically smallest codeword.
pub fn ml_oracle(code: &LinearCode, y: &LlrVector) -> Result<BitVector> {
    let (n, k) = (code.n(), code.k());
    if k > 20 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive ML needs k <= 20, got {k}"
        )));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let hd = hard_decide_slice(y.values());
    let mag: Vec<f64> = y.values().iter().map(|v| v.abs()).collect();
    let rows: Vec<BitVector> = (0..k).map(|i| code.generator().row(i)).collect();
    let cost = |x: &BitVector| -> f64 {
        let d = x.xor(&hd).expect("equal lengths");
        d.ones().into_iter().map(|i| mag[i]).sum()
    };
    // Gray-code walk over messages.
    let mut x = BitVector::zeros(n);
    let mut best = x.clone();
    let mut best_cost = cost(&x);
    for step in 1u64..1 << k {
        let flip = step.trailing_zeros() as usize;
        x.xor_assign(&rows[flip])?;
        let c = cost(&x);
        match c.total_cmp(&best_cost) {
            Ordering::Less => {
                best = x.clone();
                best_cost = c;
            }
            Ordering::Equal if lex_cmp(&x, &best) == Ordering::Less => best = x.clone(),
            _ => {}
        }
    }
    Ok(best)
}

/// Reliability cost with a total order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cost(pub f64);

impl Eq for Cost {}
impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Orders patterns by the summed sorted magnitudes they flip.
pub struct ExactCostOrder {
    sorted_magnitudes: Vec<f64>,
}

impl PatternOrder for ExactCostOrder {
    type Key = Cost;
    fn key(&self, v: &[u16]) -> Option<Cost> {
        Some(Cost(
            v.iter()
                .map(|&i| self.sorted_magnitudes[usize::from(i)])
                .fold(0.0, |acc, m| acc + m),
        ))
    }
}

/// Lazily enumerates patterns in exact likelihood order for one frame.
pub fn exact_order(y: &LlrVector) -> BestFirst<ExactCostOrder> {
    let mut mags: Vec<f64> = y.values().iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    BestFirst::new(
        y.len(),
        ExactCostOrder {
            sorted_magnitudes: mags,
        },
    )
}

/// All nonempty patterns by ascending reliability cost, truncated to `limit`;
/// cost ties go to lower Hamming weight, then lexicographic order.
pub fn exact_order_schedule(y: &LlrVector, limit: usize) -> Result<Schedule> {
    let n = y.len();
    if n > 24 {
        return Err(Error::InvalidParameter(format!(
            "exact ordering is limited to n <= 24, got {n}"
        )));
    }
    let patterns: Vec<ErrorPattern> = exact_order(y).take(limit).collect();
    Ok(Schedule::new_unchecked(n, ScheduleKind::Exact, limit, patterns))
}
