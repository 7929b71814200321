//! Monte Carlo frame engine.
//!
//! Frame `i` at SNR index `s` draws its message and noise from
//! `frame_rng(seed, s, i)`, so results do not depend on the worker count and
//! several decoders can be compared on identical noise.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{frame_rng, sigma_from_snr, AwgnChannel, LlrVector, Quantizer};
use crate::codes::LinearCode;
use crate::decoder::{exact_order, DecodeResult, Decoder};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::pipeline::{check_pruning, BitonicNetwork, EmbeddedCode, StageHistogram};
use crate::schedule::{ErrorPattern, Schedule};

const BATCH_FRAMES: u64 = 1 << 14;
const CHUNK_FRAMES: usize = 256;

/// Produces the transmitted codeword and received LLRs of any frame.
#[derive(Clone, Debug)]
pub struct FrameSource<'a> {
    code: &'a LinearCode,
    channel: AwgnChannel,
    quantizer: Option<Quantizer>,
    seed: u64,
    stream: u64,
}

impl<'a> FrameSource<'a> {
    /// Noise scaled for Eb/N0 at the code's rate; optional `B`-bit quantization.
    pub fn new(code: &'a LinearCode, snr_db: f64, seed: u64, stream: u64, quantize_bits: Option<u32>) -> Result<Self> {
        let sigma = sigma_from_snr(snr_db, code.rate())?;
        let quantizer = quantize_bits.map(|b| Quantizer::for_sigma(b, sigma)).transpose()?;
        Ok(FrameSource {
            code,
            channel: AwgnChannel::new(sigma)?,
            quantizer,
            seed,
            stream,
        })
    }

    pub fn code(&self) -> &LinearCode {
        self.code
    }

    pub fn sigma(&self) -> f64 {
        self.channel.sigma()
    }

    pub fn frame(&self, index: u64) -> (BitVector, LlrVector) {
        let mut rng = frame_rng(self.seed, self.stream, index);
        let k = self.code.k();
        let u = BitVector::from_words(k, (0..k.div_ceil(64)).map(|_| rng.random::<u64>()).collect());
        let x = self.code.encode(&u).expect("message length matches k");
        let mut y = self.channel.transmit(&x, &mut rng);
        if let Some(q) = &self.quantizer {
            y = q.quantize(&y);
        }
        (x, y)
    }
}

/// Anything that turns one received frame into a decision.
pub trait FrameDecoder: Sync {
    fn n(&self) -> usize;
    fn decode_frame(&self, y: &LlrVector) -> Result<DecodeResult>;
}

#[derive(Clone, Debug)]
enum Sorter {
    Stable,
    Network(BitonicNetwork),
}

/// A parity-check decoder bound to one schedule and query budget.
#[derive(Clone, Debug)]
pub struct ScheduledDecoder<'a> {
    decoder: Decoder,
    schedule: &'a Schedule,
    q_max: usize,
    sorter: Sorter,
}

impl<'a> ScheduledDecoder<'a> {
    /// `q_max` counts the hard-decision check.
    pub fn new(code: &LinearCode, schedule: &'a Schedule, q_max: usize) -> Result<Self> {
        if schedule.n() > code.n() {
            return Err(Error::DimensionMismatch {
                expected: code.n(),
                got: schedule.n(),
            });
        }
        if q_max == 0 {
            return Err(Error::InvalidParameter("q_max must be at least 1".into()));
        }
        Ok(ScheduledDecoder {
            decoder: Decoder::for_code(code),
            schedule,
            q_max,
            sorter: Sorter::Stable,
        })
    }

    /// Sorts with the explicit bitonic network, pruned or full.
    pub fn with_bitonic(mut self, pruned: bool) -> Result<Self> {
        let n = self.decoder.n();
        if pruned {
            check_pruning(self.schedule, n)?;
        }
        self.sorter = Sorter::Network(BitonicNetwork::new(n, pruned)?);
        Ok(self)
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn schedule(&self) -> &Schedule {
        self.schedule
    }
}

impl FrameDecoder for ScheduledDecoder<'_> {
    fn n(&self) -> usize {
        self.decoder.n()
    }

    fn decode_frame(&self, y: &LlrVector) -> Result<DecodeResult> {
        match &self.sorter {
            Sorter::Stable => self.decoder.decode(y, self.schedule, self.q_max),
            Sorter::Network(net) => {
                let sort = net.sort(y)?;
                self.decoder
                    .decode_sorted(&y.hard_decision(), &sort, self.schedule, self.q_max)
            }
        }
    }
}

/// Decodes through the `N`-wide embedding of a shorter code.
pub struct EmbeddedDecoder<'a> {
    embedded: &'a EmbeddedCode,
    schedule: &'a Schedule,
    q_max: usize,
    network: Option<BitonicNetwork>,
}

impl<'a> EmbeddedDecoder<'a> {
    pub fn new(embedded: &'a EmbeddedCode, schedule: &'a Schedule, q_max: usize) -> Self {
        EmbeddedDecoder {
            embedded,
            schedule,
            q_max,
            network: None,
        }
    }

    pub fn with_bitonic(mut self, pruned: bool) -> Result<Self> {
        let big_n = self.embedded.big_n();
        if pruned {
            check_pruning(self.schedule, big_n)?;
        }
        self.network = Some(BitonicNetwork::new(big_n, pruned)?);
        Ok(self)
    }
}

impl FrameDecoder for EmbeddedDecoder<'_> {
    fn n(&self) -> usize {
        self.embedded.n()
    }

    fn decode_frame(&self, y: &LlrVector) -> Result<DecodeResult> {
        match &self.network {
            None => self.embedded.decode(y, self.schedule, self.q_max),
            Some(net) => self
                .embedded
                .decode_with_network(y, net, self.schedule, self.q_max),
        }
    }
}

/// Only the hard-decision check; reports whether `HD(y)` is a codeword.
pub struct HardDecisionCheck(pub Decoder);

impl FrameDecoder for HardDecisionCheck {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn decode_frame(&self, y: &LlrVector) -> Result<DecodeResult> {
        let hd = y.hard_decision();
        Ok(DecodeResult {
            valid: self.0.hard_decision_is_codeword(&hd),
            codeword: hd,
            queries: 1,
            error_pattern: ErrorPattern::empty(),
            pattern_index: None,
            schedule_exhausted: false,
        })
    }
}

/// Guesses in exact per-frame posterior order, as a soft-ML reference.
pub struct ExactOrderDecoder {
    decoder: Decoder,
    q_max: usize,
}

impl ExactOrderDecoder {
    pub fn new(code: &LinearCode, q_max: usize) -> Result<Self> {
        if q_max == 0 {
            return Err(Error::InvalidParameter("q_max must be at least 1".into()));
        }
        Ok(ExactOrderDecoder {
            decoder: Decoder::for_code(code),
            q_max,
        })
    }
}

impl FrameDecoder for ExactOrderDecoder {
    fn n(&self) -> usize {
        self.decoder.n()
    }

    fn decode_frame(&self, y: &LlrVector) -> Result<DecodeResult> {
        self.decoder.decode_with(y, exact_order(y), self.q_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOptions {
    pub seed: u64,
    pub max_frames: u64,
    /// Stop once every decoder has this many frame errors; 0 disables.
    pub min_frame_errors: u64,
    pub quantize_bits: Option<u32>,
    /// Patterns per pipeline stage, for stage attribution.
    pub stage_q_s: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            seed: 1,
            max_frames: 1_000_000,
            min_frame_errors: 100,
            quantize_bits: None,
            stage_q_s: None,
        }
    }
}

/// Totals for one decoder at one SNR.
#[derive(Clone, Debug, PartialEq)]
pub struct PointStats {
    pub snr_db: f64,
    pub n: usize,
    pub frames: u64,
    pub frame_errors: u64,
    /// Codeword bit errors.
    pub bit_errors: u64,
    pub queries: u64,
    /// Frames whose hard decision was already a codeword.
    pub hd_valid: u64,
    pub abandoned: u64,
    pub stages: Option<StageHistogram>,
}

impl PointStats {
    fn new(snr_db: f64, n: usize, stage_q_s: Option<usize>) -> Self {
        PointStats {
            snr_db,
            n,
            frames: 0,
            frame_errors: 0,
            bit_errors: 0,
            queries: 0,
            hd_valid: 0,
            abandoned: 0,
            stages: stage_q_s.map(|_| StageHistogram::default()),
        }
    }

    fn record(&mut self, r: &FrameRecord, stage_q_s: Option<usize>) {
        self.frames += 1;
        self.frame_errors += u64::from(r.bit_errors > 0 || !r.valid);
        self.bit_errors += u64::from(r.bit_errors);
        self.queries += u64::from(r.queries);
        self.hd_valid += u64::from(r.valid && r.pattern_index.is_none());
        self.abandoned += u64::from(!r.valid);
        if let (Some(h), Some(q_s)) = (&mut self.stages, stage_q_s) {
            h.record(r.valid.then(|| r.pattern_index.map_or(0, |j| 1 + j as usize / q_s)));
        }
    }

    pub fn bler(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.n as u64)
    }

    pub fn avg_queries(&self) -> f64 {
        ratio(self.queries, self.frames)
    }

    pub fn hd_valid_rate(&self) -> f64 {
        ratio(self.hd_valid, self.frames)
    }

    /// Wilson 95% interval for the block error rate.
    pub fn bler_ci95(&self) -> (f64, f64) {
        wilson95(self.frame_errors, self.frames)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn wilson95(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug)]
struct FrameRecord {
    valid: bool,
    bit_errors: u32,
    queries: u32,
    pattern_index: Option<u32>,
}

fn run_frame(src: &FrameSource<'_>, decoders: &[&dyn FrameDecoder], index: u64) -> Result<Vec<FrameRecord>> {
    let (x, y) = src.frame(index);
    decoders
        .iter()
        .map(|d| {
            let r = d.decode_frame(&y)?;
            Ok(FrameRecord {
                valid: r.valid,
                bit_errors: r.bit_errors(&x) as u32,
                queries: r.queries as u32,
                pattern_index: r.pattern_index.map(|j| j as u32),
            })
        })
        .collect()
}

/// Runs every decoder on the same frames at one SNR.
pub fn simulate_point(
    code: &LinearCode,
    decoders: &[&dyn FrameDecoder],
    snr_db: f64,
    snr_index: u64,
    opts: &SimOptions,
) -> Result<Vec<PointStats>> {
    if decoders.is_empty() {
        return Err(Error::InvalidParameter("no decoders to simulate".into()));
    }
    if opts.max_frames == 0 {
        return Err(Error::InvalidParameter("max_frames must be positive".into()));
    }
    if let Some(d) = decoders.iter().find(|d| d.n() != code.n()) {
        return Err(Error::DimensionMismatch {
            expected: code.n(),
            got: d.n(),
        });
    }
    if opts.stage_q_s == Some(0) {
        return Err(Error::InvalidParameter("stage_q_s must be positive".into()));
    }
    let src = FrameSource::new(code, snr_db, opts.seed, snr_index, opts.quantize_bits)?;
    let mut stats: Vec<PointStats> = decoders
        .iter()
        .map(|d| PointStats::new(snr_db, d.n(), opts.stage_q_s))
        .collect();
    let mut next = 0u64;
    'outer: while next < opts.max_frames {
        let end = (next + BATCH_FRAMES).min(opts.max_frames);
        let indices: Vec<u64> = (next..end).collect();
        let batch: Vec<Vec<Vec<FrameRecord>>> = indices
            .par_chunks(CHUNK_FRAMES)
            .map(|chunk| chunk.iter().map(|&i| run_frame(&src, decoders, i)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        for records in batch.into_iter().flatten() {
            for (s, r) in stats.iter_mut().zip(&records) {
                s.record(r, opts.stage_q_s);
            }
            if opts.min_frame_errors > 0 && stats.iter().all(|s| s.frame_errors >= opts.min_frame_errors) {
                break 'outer;
            }
        }
        next = end;
    }
    Ok(stats)
}

/// Sweeps one decoder over a list of SNRs, in order.
pub fn simulate(code: &LinearCode, decoder: &dyn FrameDecoder, snrs_db: &[f64], opts: &SimOptions) -> Result<Vec<PointStats>> {
    snrs_db
        .iter()
        .enumerate()
        .map(|(i, &snr)| Ok(simulate_point(code, &[decoder], snr, i as u64, opts)?.remove(0)))
        .collect()
}
