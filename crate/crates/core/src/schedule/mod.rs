//! Error patterns on the reliability-sorted hard decision, their weights,
//! and the query schedules built from them.
//!
//! Pattern indices always refer to positions of the sorted vector: index 0
//! is the least reliable bit.

mod generate;
mod io;

pub use generate::{
    generate_hw_order, generate_la_ilwo, generate_lut_aided, generate_lwo, generate_ilwo, BestFirst,
    PatternOrder,
};
pub use io::{read_lut, read_schedule, write_lut, write_schedule};

use std::collections::HashSet;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Strictly ascending sorted-position indices to flip.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ErrorPattern(SmallVec<[u16; 8]>);

impl ErrorPattern {
    pub fn new(indices: &[usize]) -> Result<Self> {
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPattern(format!(
                "indices must be strictly ascending, found {} before {}",
                w[0], w[1]
            )));
        }
        if let Some(&i) = indices.iter().find(|&&i| i > usize::from(u16::MAX)) {
            return Err(Error::InvalidPattern(format!("index {i} too large")));
        }
        Ok(ErrorPattern(indices.iter().map(|&i| i as u16).collect()))
    }

    /// Like [`ErrorPattern::new`], also requiring every index below `n`.
    pub fn new_within(indices: &[usize], n: usize) -> Result<Self> {
        let p = Self::new(indices)?;
        p.check_within(n)?;
        Ok(p)
    }

    pub(crate) fn from_raw(v: SmallVec<[u16; 8]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        ErrorPattern(v)
    }

    pub fn empty() -> Self {
        ErrorPattern::default()
    }

    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if usize::from(last) >= n => Err(Error::InvalidPattern(format!(
                "index {last} out of range for length {n}"
            ))),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn indices(&self) -> &[u16] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().map(|&i| usize::from(i)).collect()
    }

    /// Hamming weight.
    #[inline]
    pub fn hw(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().map(|&i| usize::from(i))
    }

    pub fn logistic_weight(&self) -> u64 {
        logistic_weight(self)
    }

    pub fn improved_logistic_weight(&self) -> u64 {
        improved_logistic_weight(self)
    }
}

impl fmt::Debug for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// `LW = Σ (v_i + 1)`.
pub fn logistic_weight(e: &ErrorPattern) -> u64 {
    e.0.iter().map(|&v| u64::from(v) + 1).sum()
}

/// `iLW = Σ (i + 1)·(v_i + 1)`.
pub fn improved_logistic_weight(e: &ErrorPattern) -> u64 {
    e.0.iter()
        .enumerate()
        .map(|(i, &v)| (i as u64 + 1) * (u64::from(v) + 1))
        .sum()
}

/// Where a schedule came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    /// Ascending Hamming weight.
    Hw,
    /// Ascending logistic weight.
    Lwo,
    /// Ascending improved logistic weight.
    Ilwo,
    /// LUT prefix followed by iLWO.
    LaIlwo,
    /// Per-frame ordering by exact reliability cost.
    Exact,
    /// Loaded from a file or assembled by hand.
    Custom,
}

impl ScheduleKind {
    pub fn label(&self) -> &'static str {
        match self {
            ScheduleKind::Hw => "hw",
            ScheduleKind::Lwo => "lwo",
            ScheduleKind::Ilwo => "ilwo",
            ScheduleKind::LaIlwo => "la-ilwo",
            ScheduleKind::Exact => "exact",
            ScheduleKind::Custom => "custom",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "hw" | "grand" => ScheduleKind::Hw,
            "lwo" => ScheduleKind::Lwo,
            "ilwo" => ScheduleKind::Ilwo,
            "la-ilwo" | "lailwo" | "la_ilwo" => ScheduleKind::LaIlwo,
            "exact" => ScheduleKind::Exact,
            "custom" => ScheduleKind::Custom,
            other => {
                return Err(Error::InvalidParameter(format!("unknown schedule kind {other:?}")))
            }
        })
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An ordered, duplicate-free list of nonempty error patterns.
///
/// The hard decision itself is query 1 and is never part of a schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    n: usize,
    origin: ScheduleKind,
    q_max: usize,
    patterns: Vec<ErrorPattern>,
}

impl Schedule {
    pub fn new(
        n: usize,
        origin: ScheduleKind,
        q_max: usize,
        patterns: Vec<ErrorPattern>,
    ) -> Result<Self> {
        if patterns.len() > q_max {
            return Err(Error::InvalidParameter(format!(
                "{} patterns exceed the bound {q_max}",
                patterns.len()
            )));
        }
        let mut seen = HashSet::with_capacity(patterns.len());
        for (i, p) in patterns.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidPattern(format!("pattern {i} is empty")));
            }
            p.check_within(n)?;
            if !seen.insert(p) {
                return Err(Error::InvalidPattern(format!("pattern {i} {p:?} is repeated")));
            }
        }
        Ok(Schedule {
            n,
            origin,
            q_max,
            patterns,
        })
    }

    pub(crate) fn new_unchecked(
        n: usize,
        origin: ScheduleKind,
        q_max: usize,
        patterns: Vec<ErrorPattern>,
    ) -> Self {
        Schedule {
            n,
            origin,
            q_max,
            patterns,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> ScheduleKind {
        self.origin
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[ErrorPattern] {
        &self.patterns
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ErrorPattern> {
        self.patterns.iter()
    }

    /// Largest index touched by any pattern of Hamming weight at least `min_hw`.
    pub fn max_index_with_hw(&self, min_hw: usize) -> Option<usize> {
        self.patterns
            .iter()
            .filter(|p| p.hw() >= min_hw)
            .filter_map(ErrorPattern::max_index)
            .max()
    }
}

impl<'a> IntoIterator for &'a Schedule {
    type Item = &'a ErrorPattern;
    type IntoIter = std::slice::Iter<'a, ErrorPattern>;
    fn into_iter(self) -> Self::IntoIter {
        self.patterns.iter()
    }
}

/// Metadata recorded alongside a mined LUT.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LutMeta {
    pub n: usize,
    pub snr_db: Option<f64>,
    pub rate: Option<f64>,
    /// Number of error events the counts were drawn from.
    pub events_observed: u64,
    /// Number of distinct patterns seen, if known.
    pub distinct_observed: Option<usize>,
    /// Number of entries requested.
    pub requested: usize,
}

/// Empirically most frequent error patterns, most frequent first.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternLut {
    patterns: Vec<ErrorPattern>,
    counts: Vec<u64>,
    meta: LutMeta,
}

impl PatternLut {
    pub fn new(patterns: Vec<ErrorPattern>, counts: Vec<u64>, meta: LutMeta) -> Result<Self> {
        if patterns.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: patterns.len(),
                got: counts.len(),
            });
        }
        if counts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("LUT counts must be non-increasing".into()));
        }
        let mut seen = HashSet::with_capacity(patterns.len());
        for p in &patterns {
            if p.is_empty() {
                return Err(Error::InvalidPattern("LUT contains the empty pattern".into()));
            }
            p.check_within(meta.n)?;
            if !seen.insert(p) {
                return Err(Error::InvalidPattern(format!("LUT pattern {p:?} is repeated")));
            }
        }
        Ok(PatternLut {
            patterns,
            counts,
            meta,
        })
    }

    pub fn empty(n: usize) -> Self {
        PatternLut {
            patterns: Vec::new(),
            counts: Vec::new(),
            meta: LutMeta {
                n,
                ..LutMeta::default()
            },
        }
    }

    pub fn patterns(&self) -> &[ErrorPattern] {
        &self.patterns
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn meta(&self) -> &LutMeta {
        &self.meta
    }

    pub fn n(&self) -> usize {
        self.meta.n
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// True when fewer patterns were available than requested.
    pub fn is_short(&self) -> bool {
        self.patterns.len() < self.meta.requested
    }

    /// Fraction of observed events covered by the retained patterns.
    pub fn coverage(&self) -> f64 {
        if self.meta.events_observed == 0 {
            return 0.0;
        }
        self.counts.iter().sum::<u64>() as f64 / self.meta.events_observed as f64
    }

    /// The first `len` entries.
    pub fn truncated(&self, len: usize) -> PatternLut {
        let len = len.min(self.len());
        PatternLut {
            patterns: self.patterns[..len].to_vec(),
            counts: self.counts[..len].to_vec(),
            meta: LutMeta {
                requested: len,
                ..self.meta.clone()
            },
        }
    }
}
