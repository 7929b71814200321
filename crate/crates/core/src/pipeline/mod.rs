//! Behavioral model of the fixed-latency pipelined decoder.
//!
//! Stage 0 sorts and checks the hard decision, stages `1..=q_max/q_s` each
//! try `q_s` patterns, and the last stage restores natural order.

mod bitonic;
mod embed;

pub use bitonic::{bitonic_sort, check_pruning, BitonicNetwork, Comparator};
pub use embed::{embed_code, EmbeddedCode};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::decoder::DecodeResult;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Maximum code length `N`.
    pub big_n: usize,
    pub r_min: f64,
    /// Scheduled patterns, not counting the hard-decision check.
    pub q_max: usize,
    pub q_s: usize,
    pub q_lut: usize,
    /// LLR width in bits, sign included.
    pub b: u32,
    pub f_mhz: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            big_n: 128,
            r_min: 1.0 / 128.0,
            q_max: 1 << 13,
            q_s: 512,
            q_lut: 512,
            b: 8,
            f_mhz: 616,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.big_n < 2 || !self.big_n.is_power_of_two() {
            return bad(format!("N = {} must be a power of two >= 2", self.big_n));
        }
        if !(self.r_min > 0.0 && self.r_min < 1.0) {
            return bad(format!("r_min = {} must lie in (0, 1)", self.r_min));
        }
        if self.q_s == 0 || self.q_max == 0 || self.q_max % self.q_s != 0 {
            return bad(format!(
                "q_max = {} must be a positive multiple of q_s = {}",
                self.q_max, self.q_s
            ));
        }
        if self.q_lut > self.q_max {
            return bad(format!("q_lut = {} exceeds q_max = {}", self.q_lut, self.q_max));
        }
        if !(2..=31).contains(&self.b) {
            return bad(format!("B = {} must lie in 2..=31", self.b));
        }
        if self.f_mhz == 0 {
            return bad("clock frequency must be positive".into());
        }
        Ok(())
    }

    /// Pattern stages between the sorter and the output stage.
    pub fn pattern_stages(&self) -> usize {
        self.q_max / self.q_s
    }

    pub fn log2_n(&self) -> usize {
        self.big_n.trailing_zeros() as usize
    }

    /// Rows of the parity-check memory, `N(1 − R_min)`.
    pub fn h_rows(&self) -> usize {
        ((self.big_n as f64) * (1.0 - self.r_min) + 1e-9).floor() as usize
    }

    /// Largest LLR magnitude representable on `B` bits.
    pub fn max_llr_magnitude(&self) -> f64 {
        f64::from((1u32 << (self.b - 1)) - 1)
    }
}

/// `T = Q_max/Q_S + 2`.
pub fn stage_count(cfg: &PipelineConfig) -> Result<usize> {
    cfg.validate()?;
    Ok(cfg.pattern_stages() + 2)
}

/// `L = Q_max/Q_S + 2 + log₂N` clock cycles.
pub fn latency_cycles(cfg: &PipelineConfig) -> Result<usize> {
    Ok(stage_count(cfg)? + cfg.log2_n())
}

/// Latency in nanoseconds as an exact fraction.
pub fn latency_ns_exact(cfg: &PipelineConfig) -> Result<Ratio<u64>> {
    Ok(Ratio::new(latency_cycles(cfg)? as u64 * 1000, cfg.f_mhz))
}

pub fn latency_ns(cfg: &PipelineConfig) -> Result<f64> {
    Ok(ratio_to_f64(&latency_ns_exact(cfg)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Throughput {
    /// `n · r`, information bits per cycle.
    pub bits_per_cycle: Ratio<u64>,
    /// `n · r · f`.
    pub gbps: Ratio<u64>,
}

impl Throughput {
    pub fn bits_per_cycle_f64(&self) -> f64 {
        ratio_to_f64(&self.bits_per_cycle)
    }

    pub fn gbps_f64(&self) -> f64 {
        ratio_to_f64(&self.gbps)
    }
}

/// Information throughput of an `(n, k)` code on this decoder.
pub fn throughput(cfg: &PipelineConfig, n: usize, k: usize) -> Result<Throughput> {
    cfg.validate()?;
    check_fit(cfg, n, k)?;
    let bits = Ratio::from_integer(k as u64);
    Ok(Throughput {
        gbps: bits * Ratio::new(cfg.f_mhz, 1000),
        bits_per_cycle: bits,
    })
}

pub(crate) fn check_fit(cfg: &PipelineConfig, n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::DoesNotFit(format!("({n}, {k}) is not a valid code size")));
    }
    if n > cfg.big_n {
        return Err(Error::DoesNotFit(format!("n = {n} exceeds N = {}", cfg.big_n)));
    }
    if (k as f64) < cfg.r_min * n as f64 - 1e-9 {
        return Err(Error::DoesNotFit(format!(
            "rate {k}/{n} is below r_min = {}",
            cfg.r_min
        )));
    }
    if n - k > cfg.h_rows() {
        return Err(Error::DoesNotFit(format!(
            "{} parity checks exceed the {} rows of H",
            n - k,
            cfg.h_rows()
        )));
    }
    Ok(())
}

fn ratio_to_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Formats with two decimals, rounding halves up, from the exact value.
pub fn format_2dp(r: &Ratio<u64>) -> String {
    let hundredths = (r * Ratio::from_integer(100u64) + Ratio::new(1, 2)).floor().to_integer();
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// Pipeline stage that resolved a frame; `None` if decoding was abandoned.
pub fn stage_of_query(cfg: &PipelineConfig, result: &DecodeResult) -> Result<Option<usize>> {
    cfg.validate()?;
    if result.queries > cfg.q_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} queries exceed q_max = {} patterns plus the hard-decision check",
            result.queries, cfg.q_max
        )));
    }
    if !result.valid {
        return Ok(None);
    }
    Ok(Some(match result.pattern_index {
        None => 0,
        Some(j) => 1 + j / cfg.q_s,
    }))
}

/// Per-stage resolution counts; merges associatively.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StageHistogram {
    /// `resolved[t]`: frames resolved at stage `t`.
    pub resolved: Vec<u64>,
    pub abandoned: u64,
}

impl StageHistogram {
    pub fn new(cfg: &PipelineConfig) -> Self {
        StageHistogram {
            resolved: vec![0; cfg.pattern_stages() + 1],
            abandoned: 0,
        }
    }

    pub fn record(&mut self, stage: Option<usize>) {
        match stage {
            Some(t) => {
                if self.resolved.len() <= t {
                    self.resolved.resize(t + 1, 0);
                }
                self.resolved[t] += 1;
            }
            None => self.abandoned += 1,
        }
    }

    pub fn merge(&mut self, other: &StageHistogram) {
        if self.resolved.len() < other.resolved.len() {
            self.resolved.resize(other.resolved.len(), 0);
        }
        for (a, b) in self.resolved.iter_mut().zip(&other.resolved) {
            *a += b;
        }
        self.abandoned += other.abandoned;
    }

    pub fn frames(&self) -> u64 {
        self.resolved.iter().sum::<u64>() + self.abandoned
    }

    /// Activation of every stage `0..T`; abandoned frames count as active throughout.
    pub fn profile(&self, stages: usize) -> ActivationProfile {
        let frames = self.frames();
        let f = frames.max(1) as f64;
        let mut at_or_above = self.abandoned;
        let mut rates = vec![0.0; stages];
        for t in (0..stages).rev() {
            at_or_above += self.resolved.get(t).copied().unwrap_or(0);
            rates[t] = at_or_above as f64 / f;
        }
        ActivationProfile {
            rates,
            resolved_at_stage0: self.resolved.first().copied().unwrap_or(0) as f64 / f,
            abandoned: self.abandoned as f64 / f,
            frames,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationProfile {
    /// `rates[t]`: fraction of frames still unresolved on entering stage `t`.
    pub rates: Vec<f64>,
    pub resolved_at_stage0: f64,
    pub abandoned: f64,
    pub frames: u64,
}

impl ActivationProfile {
    pub fn stage(&self, t: usize) -> f64 {
        self.rates.get(t).copied().unwrap_or(0.0)
    }
}

pub fn activation_profile<'a, I>(results: I, cfg: &PipelineConfig) -> Result<ActivationProfile>
where
    I: IntoIterator<Item = &'a DecodeResult>,
{
    let mut hist = StageHistogram::new(cfg);
    for r in results {
        hist.record(stage_of_query(cfg, r)?);
    }
    if hist.frames() == 0 {
        return Err(Error::InvalidParameter("no decode results".into()));
    }
    Ok(hist.profile(stage_count(cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVector;
    use crate::schedule::ErrorPattern;

    fn cfg(q_s: usize, f_mhz: u64) -> PipelineConfig {
        PipelineConfig {
            q_s,
            f_mhz,
            ..PipelineConfig::default()
        }
    }

    fn result(valid: bool, queries: usize, j: Option<usize>) -> DecodeResult {
        DecodeResult {
            codeword: BitVector::zeros(4),
            valid,
            queries,
            error_pattern: ErrorPattern::empty(),
            pattern_index: j,
            schedule_exhausted: false,
        }
    }

    #[test]
    fn stage_counts() {
        assert_eq!(stage_count(&cfg(512, 616)).unwrap(), 18);
        assert_eq!(stage_count(&cfg(256, 701)).unwrap(), 34);
        let single = PipelineConfig {
            q_max: 64,
            q_s: 64,
            q_lut: 0,
            ..PipelineConfig::default()
        };
        assert_eq!(stage_count(&single).unwrap(), 3);
        assert!(stage_count(&cfg(500, 616)).is_err());
    }

    #[test]
    fn latencies() {
        let a = cfg(512, 616);
        assert_eq!(latency_cycles(&a).unwrap(), 25);
        assert_eq!(format_2dp(&latency_ns_exact(&a).unwrap()), "40.58");
        let c = cfg(256, 701);
        assert_eq!(latency_cycles(&c).unwrap(), 41);
        assert_eq!(format_2dp(&latency_ns_exact(&c).unwrap()), "58.49");
        let tiny = PipelineConfig {
            big_n: 2,
            q_max: 4,
            q_s: 4,
            q_lut: 0,
            ..PipelineConfig::default()
        };
        assert_eq!(latency_cycles(&tiny).unwrap(), 4);
        assert!((latency_ns(&a).unwrap() - 25_000.0 / 616.0).abs() < 1e-12);
    }

    #[test]
    fn throughputs() {
        let t = throughput(&cfg(512, 616), 127, 113).unwrap();
        assert_eq!(t.bits_per_cycle, Ratio::from_integer(113));
        assert_eq!(format_2dp(&t.gbps), "69.61");
        assert_eq!(format_2dp(&throughput(&cfg(256, 701), 127, 113).unwrap().gbps), "79.21");
        let pc = PipelineConfig {
            r_min: 0.75,
            ..cfg(512, 616)
        };
        assert_eq!(format_2dp(&throughput(&pc, 128, 105).unwrap().gbps), "64.68");
        // 105 · 0.701 = 73.605 exactly; halves round up.
        assert_eq!(format_2dp(&throughput(&cfg(256, 701), 128, 105).unwrap().gbps), "73.61");
        let full = PipelineConfig {
            f_mhz: 1000,
            ..PipelineConfig::default()
        };
        assert_eq!(throughput(&full, 128, 128).unwrap().gbps, Ratio::from_integer(128));
    }

    #[test]
    fn fit_is_enforced() {
        assert!(throughput(&cfg(512, 616), 129, 120).is_err());
        let b = PipelineConfig {
            r_min: 0.656,
            ..cfg(512, 616)
        };
        assert_eq!(b.h_rows(), 44);
        assert!(throughput(&b, 127, 113).is_ok());
        assert!(throughput(&b, 128, 64).is_err());
        assert_eq!(PipelineConfig::default().h_rows(), 127);
    }

    #[test]
    fn two_decimal_rounding() {
        assert_eq!(format_2dp(&Ratio::new(1, 200)), "0.01");
        assert_eq!(format_2dp(&Ratio::new(1, 201)), "0.00");
        assert_eq!(format_2dp(&Ratio::from_integer(7)), "7.00");
    }

    #[test]
    fn stage_attribution() {
        let c = cfg(512, 616);
        assert_eq!(stage_of_query(&c, &result(true, 1, None)).unwrap(), Some(0));
        assert_eq!(stage_of_query(&c, &result(true, 513, Some(511))).unwrap(), Some(1));
        assert_eq!(stage_of_query(&c, &result(true, 514, Some(512))).unwrap(), Some(2));
        assert_eq!(stage_of_query(&c, &result(false, 8193, None)).unwrap(), None);
        assert!(stage_of_query(&c, &result(false, 9000, None)).is_err());
    }

    #[test]
    fn profile_rates() {
        let c = PipelineConfig {
            q_max: 4,
            q_s: 2,
            q_lut: 0,
            ..PipelineConfig::default()
        };
        let rs = [
            result(true, 1, None),
            result(true, 1, None),
            result(true, 2, Some(0)),
            result(true, 4, Some(2)),
            result(false, 5, None),
        ];
        let p = activation_profile(&rs, &c).unwrap();
        assert_eq!(p.rates, vec![1.0, 0.6, 0.4, 0.2]);
        assert_eq!(p.resolved_at_stage0, 0.4);
        assert_eq!(p.frames, 5);
        assert!(activation_profile(&[], &c).is_err());
        let mut a = StageHistogram::new(&c);
        let mut b = StageHistogram::new(&c);
        a.record(Some(0));
        b.record(None);
        b.record(Some(2));
        a.merge(&b);
        assert_eq!((a.resolved.clone(), a.abandoned), (vec![1, 0, 1], 1));
    }
}
