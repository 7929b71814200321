use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use smallvec::{smallvec, SmallVec};

use super::{ErrorPattern, PatternLut, Schedule, ScheduleKind};
use crate::error::{Error, Result};

/// A total order on patterns, given by a weight that never decreases when a
/// pattern grows or its last index moves up.
///
/// Equal weights are ordered by ascending Hamming weight, then
/// lexicographically. `key` returns `None` to exclude a pattern together with
/// everything that extends it.
pub trait PatternOrder {
    type Key: Ord;
    fn key(&self, v: &[u16]) -> Option<Self::Key>;
}

struct Node<K> {
    key: K,
    v: SmallVec<[u16; 8]>,
}

impl<K: Ord> Node<K> {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then(self.v.len().cmp(&other.v.len()))
            .then_with(|| self.v.cmp(&other.v))
    }
}

impl<K: Ord> PartialEq for Node<K> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}
impl<K: Ord> Eq for Node<K> {}
impl<K: Ord> PartialOrd for Node<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<K: Ord> Ord for Node<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key(other)
    }
}

/// Best-first enumeration of nonempty patterns on `n` positions.
///
/// Every pattern has one parent: `{…, a, a+1}` comes from `{…, a}` by
/// appending, any other `{…, b}` from `{…, b−1}` by moving the last index up.
/// Both moves raise the order key, so popping a min-heap seeded with `{0}`
/// yields patterns in exact sorted order while holding only the frontier.
pub struct BestFirst<O: PatternOrder> {
    n: usize,
    order: O,
    heap: BinaryHeap<Reverse<Node<O::Key>>>,
}

impl<O: PatternOrder> BestFirst<O> {
    pub fn new(n: usize, order: O) -> Self {
        let mut s = BestFirst {
            n,
            order,
            heap: BinaryHeap::new(),
        };
        if n > 0 {
            s.push(smallvec![0]);
        }
        s
    }

    fn push(&mut self, v: SmallVec<[u16; 8]>) {
        if let Some(key) = self.order.key(&v) {
            self.heap.push(Reverse(Node { key, v }));
        }
    }
}

impl<O: PatternOrder> Iterator for BestFirst<O> {
    type Item = ErrorPattern;

    fn next(&mut self) -> Option<ErrorPattern> {
        let Reverse(node) = self.heap.pop()?;
        let last = *node.v.last().expect("patterns are nonempty");
        if usize::from(last) + 1 < self.n {
            let mut appended = node.v.clone();
            appended.push(last + 1);
            self.push(appended);
            let mut moved = node.v.clone();
            *moved.last_mut().unwrap() = last + 1;
            self.push(moved);
        }
        Some(ErrorPattern::from_raw(node.v))
    }
}

/// Hamming-weight order with an upper bound on the weight.
pub struct HwOrder {
    pub max_hw: usize,
}

impl PatternOrder for HwOrder {
    type Key = ();
    fn key(&self, v: &[u16]) -> Option<()> {
        (v.len() <= self.max_hw).then_some(())
    }
}

/// Logistic-weight order with optional Hamming and logistic weight bounds.
pub struct LwOrder {
    pub max_hw: Option<usize>,
    pub max_lw: Option<u64>,
}

impl PatternOrder for LwOrder {
    type Key = u64;
    fn key(&self, v: &[u16]) -> Option<u64> {
        let lw: u64 = v.iter().map(|&i| u64::from(i) + 1).sum();
        if self.max_hw.is_some_and(|h| v.len() > h) || self.max_lw.is_some_and(|w| lw > w) {
            return None;
        }
        Some(lw)
    }
}

/// Improved logistic-weight order.
pub struct IlwOrder;

impl PatternOrder for IlwOrder {
    type Key = u64;
    fn key(&self, v: &[u16]) -> Option<u64> {
        Some(
            v.iter()
                .enumerate()
                .map(|(i, &x)| (i as u64 + 1) * (u64::from(x) + 1))
                .sum(),
        )
    }
}

fn check_q_max(q_max: usize) -> Result<()> {
    if q_max == 0 {
        return Err(Error::InvalidParameter("q_max must be at least 1".into()));
    }
    Ok(())
}

/// The first `q_max` patterns in ascending logistic weight, or all patterns
/// meeting the bounds if there are fewer.
pub fn generate_lwo(
    n: usize,
    q_max: usize,
    max_hw: Option<usize>,
    max_lw: Option<u64>,
) -> Result<Schedule> {
    check_q_max(q_max)?;
    let patterns = BestFirst::new(n, LwOrder { max_hw, max_lw }).take(q_max).collect();
    Ok(Schedule::new_unchecked(n, ScheduleKind::Lwo, q_max, patterns))
}

/// The first `q_max` patterns in ascending improved logistic weight.
pub fn generate_ilwo(n: usize, q_max: usize) -> Result<Schedule> {
    check_q_max(q_max)?;
    let patterns = BestFirst::new(n, IlwOrder).take(q_max).collect();
    Ok(Schedule::new_unchecked(n, ScheduleKind::Ilwo, q_max, patterns))
}

/// The first `q_max` patterns of weight at most `max_hw`, by ascending weight.
pub fn generate_hw_order(n: usize, q_max: usize, max_hw: usize) -> Result<Schedule> {
    check_q_max(q_max)?;
    let patterns = BestFirst::new(n, HwOrder { max_hw }).take(q_max).collect();
    Ok(Schedule::new_unchecked(n, ScheduleKind::Hw, q_max, patterns))
}

/// LUT patterns first, in LUT order, then `base` order with LUT members
/// skipped, up to `q_max` patterns in total.
pub fn generate_lut_aided(
    lut: &PatternLut,
    base: ScheduleKind,
    n: usize,
    q_max: usize,
) -> Result<Schedule> {
    check_q_max(q_max)?;
    if lut.len() > q_max {
        return Err(Error::InvalidParameter(format!(
            "LUT holds {} patterns, more than q_max = {q_max}",
            lut.len()
        )));
    }
    for p in lut.patterns() {
        p.check_within(n)?;
    }
    let members: HashSet<&ErrorPattern> = lut.patterns().iter().collect();
    let mut patterns = lut.patterns().to_vec();
    let rest = q_max - lut.len();
    let tail: Box<dyn Iterator<Item = ErrorPattern>> = match base {
        ScheduleKind::Ilwo | ScheduleKind::LaIlwo => Box::new(BestFirst::new(n, IlwOrder)),
        ScheduleKind::Lwo => Box::new(BestFirst::new(n, LwOrder { max_hw: None, max_lw: None })),
        ScheduleKind::Hw => Box::new(BestFirst::new(n, HwOrder { max_hw: n })),
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other} cannot follow a LUT prefix"
            )))
        }
    };
    patterns.extend(tail.filter(|p| !members.contains(p)).take(rest));
    let origin = if matches!(base, ScheduleKind::Ilwo | ScheduleKind::LaIlwo) {
        ScheduleKind::LaIlwo
    } else {
        ScheduleKind::Custom
    };
    Ok(Schedule::new_unchecked(n, origin, q_max, patterns))
}

/// LUT-aided iLWO.
pub fn generate_la_ilwo(lut: &PatternLut, n: usize, q_max: usize) -> Result<Schedule> {
    generate_lut_aided(lut, ScheduleKind::Ilwo, n, q_max)
}
