//! Empirical mining of the most frequent sorted-position error patterns.
//!
//! Uncoded all-zero frames go through the channel. Every frame whose hard
//! decision contains an error contributes one event: the set of sorted
//! positions where the hard decision is wrong.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::channel::{frame_rng, ChannelConfig};
use crate::error::{Error, Result};
use crate::schedule::{read_lut, write_lut, ErrorPattern, LutMeta, PatternLut};

const BATCH_FRAMES: u64 = 1 << 16;
const CHUNK_FRAMES: u64 = 1 << 12;

/// Every distinct pattern seen, most frequent first; count ties in
/// lexicographic pattern order.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternCounts {
    pub n: usize,
    pub cfg: ChannelConfig,
    pub events: u64,
    pub frames: u64,
    pub ranked: Vec<(ErrorPattern, u64)>,
}

impl PatternCounts {
    pub fn distinct(&self) -> usize {
        self.ranked.len()
    }

    /// The `q_lut` most frequent patterns; shorter if fewer were seen.
    pub fn top(&self, q_lut: usize) -> PatternLut {
        let kept = &self.ranked[..q_lut.min(self.ranked.len())];
        let meta = LutMeta {
            n: self.n,
            snr_db: Some(self.cfg.snr_db),
            rate: Some(self.cfg.rate),
            events_observed: self.events,
            distinct_observed: Some(self.ranked.len()),
            requested: q_lut,
        };
        PatternLut::new(
            kept.iter().map(|(p, _)| p.clone()).collect(),
            kept.iter().map(|&(_, c)| c).collect(),
            meta,
        )
        .expect("ranked counts form a valid LUT")
    }
}

/// Sorted-position error pattern of one all-zero frame, if it has errors.
///
/// `y` holds the received symbols; their order by magnitude equals the LLR
/// order. Sorting is stable, so ties go to the lower natural index.
fn frame_pattern(y: &[f64]) -> Option<ErrorPattern> {
    let errors: SmallVec<[usize; 8]> = (0..y.len()).filter(|&i| y[i] < 0.0).collect();
    if errors.is_empty() {
        return None;
    }
    let mut ranks: SmallVec<[u16; 8]> = errors
        .iter()
        .map(|&i| {
            let m = y[i].abs();
            let below = y
                .iter()
                .enumerate()
                .filter(|&(j, v)| {
                    let a = v.abs();
                    a < m || (a == m && j < i)
                })
                .count();
            below as u16
        })
        .collect();
    ranks.sort_unstable();
    Some(ErrorPattern::from_raw(ranks))
}

fn mine_chunk(n: usize, cfg: &ChannelConfig, sigma: f64, start: u64, end: u64) -> Vec<(u64, ErrorPattern)> {
    let mut y = vec![0.0f64; n];
    let mut out = Vec::new();
    for frame in start..end {
        let mut rng = frame_rng(cfg.seed, 0, frame);
        for v in y.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = 1.0 + sigma * z;
        }
        if let Some(p) = frame_pattern(&y) {
            out.push((frame, p));
        }
    }
    out
}

/// Counts patterns over exactly `num_error_events` events.
///
/// Frames are visited in index order regardless of worker count, so the
/// result depends only on `(n, cfg, num_error_events)`.
pub fn mine_pattern_counts(n: usize, cfg: &ChannelConfig, num_error_events: u64) -> Result<PatternCounts> {
    if num_error_events == 0 {
        return Err(Error::InvalidParameter("need at least one error event".into()));
    }
    if n == 0 || n > usize::from(u16::MAX) {
        return Err(Error::InvalidParameter(format!("unsupported length {n}")));
    }
    let sigma = cfg.sigma()?;
    let mut counts: HashMap<ErrorPattern, u64> = HashMap::new();
    let (mut events, mut frames) = (0u64, 0u64);
    let mut next = 0u64;
    while events < num_error_events {
        let chunks: Vec<(u64, u64)> = (0..BATCH_FRAMES / CHUNK_FRAMES)
            .map(|c| (next + c * CHUNK_FRAMES, next + (c + 1) * CHUNK_FRAMES))
            .collect();
        next += BATCH_FRAMES;
        let found: Vec<Vec<(u64, ErrorPattern)>> = chunks
            .par_iter()
            .map(|&(a, b)| mine_chunk(n, cfg, sigma, a, b))
            .collect();
        for (frame, p) in found.into_iter().flatten() {
            if events == num_error_events {
                break;
            }
            *counts.entry(p).or_insert(0) += 1;
            events += 1;
            frames = frame + 1;
        }
    }
    let mut ranked: Vec<(ErrorPattern, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(PatternCounts {
        n,
        cfg: *cfg,
        events,
        frames,
        ranked,
    })
}

/// The `q_lut` most frequent error patterns over `num_error_events` events.
pub fn mine_patterns(n: usize, cfg: &ChannelConfig, num_error_events: u64, q_lut: usize) -> Result<PatternLut> {
    if q_lut == 0 {
        return Err(Error::InvalidParameter("q_lut must be at least 1".into()));
    }
    Ok(mine_pattern_counts(n, cfg, num_error_events)?.top(q_lut))
}

pub fn save_lut(lut: &PatternLut, path: impl AsRef<Path>) -> Result<()> {
    write_lut(lut, BufWriter::new(File::create(path)?))
}

pub fn load_lut(path: impl AsRef<Path>) -> Result<PatternLut> {
    read_lut(BufReader::new(File::open(path)?))
}
