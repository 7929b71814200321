//! BPSK over AWGN, LLR computation and hard decisions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Channel log-likelihood ratios. Positive values favour bit 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("LLR {i} is not finite")));
        }
        Ok(LlrVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hard_decision(&self) -> BitVector {
        hard_decide(self)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Neg for &LlrVector {
    type Output = LlrVector;
    fn neg(self) -> LlrVector {
        LlrVector(self.0.iter().map(|v| -v).collect())
    }
}

/// Operating point of the channel: Eb/N0 in dB, the code rate used to scale
/// the noise, and the RNG seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub rate: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(snr_db: f64, rate: f64, seed: u64) -> Result<Self> {
        sigma_from_snr(snr_db, rate)?;
        Ok(ChannelConfig { snr_db, rate, seed })
    }

    pub fn sigma(&self) -> Result<f64> {
        sigma_from_snr(self.snr_db, self.rate)
    }
}

/// Noise standard deviation for unit-energy BPSK at the given Eb/N0:
/// `σ = 1 / sqrt(2 · r · 10^(snr/10))`.
pub fn sigma_from_snr(snr_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!("rate {rate} outside (0, 1]")));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("snr {snr_db} dB is not finite")));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0)).sqrt())
}

/// Splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for one frame, derived from `(seed, stream, frame)`.
///
/// Runs that visit frames in any order or on any number of workers draw the
/// same noise for the same frame.
pub fn frame_rng(seed: u64, stream: u64, frame: u64) -> ChaCha8Rng {
    let a = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let b = mix64(a ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03));
    let c = mix64(b ^ frame.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7));
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&mix64(c.wrapping_add(i as u64)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// BPSK (0 → +1, 1 → −1) through additive Gaussian noise.
#[derive(Clone, Copy, Debug)]
pub struct AwgnChannel {
    sigma: f64,
    llr_scale: f64,
}

impl AwgnChannel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
        }
        Ok(AwgnChannel {
            sigma,
            llr_scale: 2.0 / (sigma * sigma),
        })
    }

    pub fn from_config(cfg: &ChannelConfig) -> Result<Self> {
        Self::new(cfg.sigma()?)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// LLR magnitude of a noiseless symbol, `2/σ²`.
    pub fn noiseless_llr(&self) -> f64 {
        self.llr_scale
    }

    /// Writes `2·r_i/σ²` for each received sample into `out`.
    pub fn transmit_into<R: Rng + ?Sized>(&self, x: &BitVector, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.extend(x.iter().map(|bit| {
            let s = if bit { -1.0 } else { 1.0 };
            let noise: f64 = rng.sample(StandardNormal);
            (s + self.sigma * noise) * self.llr_scale
        }));
    }

    pub fn transmit<R: Rng + ?Sized>(&self, x: &BitVector, rng: &mut R) -> LlrVector {
        let mut out = Vec::with_capacity(x.len());
        self.transmit_into(x, rng, &mut out);
        LlrVector(out)
    }
}

pub fn transmit<R: Rng + ?Sized>(x: &BitVector, cfg: &ChannelConfig, rng: &mut R) -> Result<LlrVector> {
    Ok(AwgnChannel::from_config(cfg)?.transmit(x, rng))
}

/// Bit i is 1 iff `y_i < 0`; an exact zero decides 0.
pub fn hard_decide(y: &LlrVector) -> BitVector {
    hard_decide_slice(&y.0)
}

pub fn hard_decide_slice(y: &[f64]) -> BitVector {
    let mut words = vec![0u64; y.len().div_ceil(64)];
    for (i, &v) in y.iter().enumerate() {
        if v < 0.0 {
            words[i / 64] |= 1u64 << (i % 64);
        }
    }
    BitVector::from_words(y.len(), words)
}

/// Sign-magnitude LLR quantizer over `bits` bits.
///
/// Magnitudes are divided by `step`, rounded, and saturated to `2^(bits−1)−1`.
/// A nonzero input keeps its sign with magnitude at least one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantizer {
    bits: u32,
    step: f64,
}

impl Quantizer {
    pub fn new(bits: u32, step: f64) -> Result<Self> {
        if !(2..=31).contains(&bits) {
            return Err(Error::InvalidParameter(format!("quantizer needs 2..=31 bits, got {bits}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("quantizer step {step} must be positive")));
        }
        Ok(Quantizer { bits, step })
    }

    /// Step chosen so that the noiseless magnitude `2/σ²` lands at half range.
    pub fn for_sigma(bits: u32, sigma: f64) -> Result<Self> {
        let half = f64::from(1u32 << bits.clamp(2, 31).saturating_sub(2));
        Self::new(bits, 2.0 / (sigma * sigma) / half)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn max_magnitude(&self) -> f64 {
        f64::from((1u32 << (self.bits - 1)) - 1)
    }

    pub fn quantize_value(&self, v: f64) -> f64 {
        if v == 0.0 {
            return 0.0;
        }
        let mag = (v.abs() / self.step).round().clamp(1.0, self.max_magnitude());
        mag.copysign(v)
    }

    pub fn apply_slice(&self, values: &mut [f64]) {
        for v in values {
            *v = self.quantize_value(*v);
        }
    }

    pub fn quantize(&self, y: &LlrVector) -> LlrVector {
        LlrVector(y.0.iter().map(|&v| self.quantize_value(v)).collect())
    }
}

/// Quantizes with a unit step: each LLR is rounded to an integer and saturated.
pub fn quantize(y: &LlrVector, bits: u32) -> Result<LlrVector> {
    Ok(Quantizer::new(bits, 1.0)?.quantize(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    fn q_function(x: f64) -> f64 {
        0.5 * erfc(x / std::f64::consts::SQRT_2)
    }

    #[test]
    fn sigma_reference_points() {
        assert!((sigma_from_snr(0.0, 1.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let s = sigma_from_snr(5.75, 113.0 / 127.0).unwrap();
        assert!((s - 0.38671).abs() < 5e-5, "{s}");
        assert!((q_function(1.0 / s) - 4.86e-3).abs() < 0.01e-3);
        let s = sigma_from_snr(7.4, 105.0 / 128.0).unwrap();
        assert!((s - 0.33306).abs() < 5e-5, "{s}");
        let valid = (1.0 - q_function(1.0 / s)).powi(128);
        assert!((valid - 0.843).abs() < 1e-3, "{valid}");
    }

    #[test]
    fn sigma_rejects_bad_rate() {
        assert!(sigma_from_snr(3.0, 0.0).is_err());
        assert!(sigma_from_snr(3.0, 1.5).is_err());
        assert!(sigma_from_snr(f64::NAN, 0.5).is_err());
        assert!(ChannelConfig::new(1.0, -0.1, 0).is_err());
    }

    #[test]
    fn hard_decision_rules() {
        let y = LlrVector::new(vec![2.3, -0.1, 0.0]).unwrap();
        assert_eq!(hard_decide(&y).to_bits(), vec![0, 1, 0]);
        let neg = -&y;
        assert_eq!(hard_decide(&neg).to_bits(), vec![1, 0, 0]);
        assert!(LlrVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn antisymmetric_hard_decision() {
        let mut rng = frame_rng(1, 0, 0);
        let ch = AwgnChannel::new(0.8).unwrap();
        for _ in 0..100 {
            let y = ch.transmit(&BitVector::zeros(64), &mut rng);
            let mut flipped = hard_decide(&y);
            flipped.xor_assign(&hard_decide(&-&y)).unwrap();
            assert_eq!(flipped.weight(), 64);
        }
    }

    #[test]
    fn noiseless_limit_recovers_codeword() {
        let ch = AwgnChannel::new(1e-6).unwrap();
        let mut rng = frame_rng(2, 0, 0);
        let x = BitVector::from_bits(&[1, 0, 1, 1, 0, 0, 1]);
        assert_eq!(hard_decide(&ch.transmit(&x, &mut rng)), x);
    }

    #[test]
    fn mean_llr_of_zero_word() {
        let ch = AwgnChannel::new(0.5).unwrap();
        let mut rng = frame_rng(3, 0, 0);
        let y = ch.transmit(&BitVector::zeros(200_000), &mut rng);
        let mean = y.values().iter().sum::<f64>() / y.len() as f64;
        // Mean 2/σ² = 8, standard error 2/σ ≈ 4 / sqrt(2e5).
        assert!((mean - 8.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn empirical_bit_error_rate() {
        let cfg = ChannelConfig::new(5.75, 113.0 / 127.0, 4).unwrap();
        let ch = AwgnChannel::from_config(&cfg).unwrap();
        let p = q_function(1.0 / ch.sigma());
        let frame = BitVector::zeros(1000);
        let frames = 10_000u64;
        let mut errors = 0u64;
        let mut buf = Vec::new();
        for f in 0..frames {
            let mut rng = frame_rng(cfg.seed, 0, f);
            ch.transmit_into(&frame, &mut rng, &mut buf);
            errors += buf.iter().filter(|&&v| v < 0.0).count() as u64;
        }
        let n = (frames * 1000) as f64;
        let sd = (n * p * (1.0 - p)).sqrt();
        assert!((errors as f64 - n * p).abs() < 3.0 * sd, "{errors} vs {}", n * p);
    }

    #[test]
    fn seeded_streams_reproduce() {
        let ch = AwgnChannel::new(0.7).unwrap();
        let x = BitVector::zeros(32);
        let a = ch.transmit(&x, &mut frame_rng(9, 1, 77));
        let b = ch.transmit(&x, &mut frame_rng(9, 1, 77));
        let c = ch.transmit(&x, &mut frame_rng(9, 1, 78));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn llr_order_matches_sample_order() {
        let ch = AwgnChannel::new(0.6).unwrap();
        let mut rng = frame_rng(5, 0, 0);
        let y = ch.transmit(&BitVector::zeros(500), &mut rng);
        let r: Vec<f64> = y.values().iter().map(|v| v / ch.noiseless_llr()).collect();
        let mut by_llr: Vec<usize> = (0..500).collect();
        by_llr.sort_by(|&a, &b| y.values()[a].abs().total_cmp(&y.values()[b].abs()));
        let mut by_r: Vec<usize> = (0..500).collect();
        by_r.sort_by(|&a, &b| r[a].abs().total_cmp(&r[b].abs()));
        assert_eq!(by_llr, by_r);
    }

    #[test]
    fn quantizer_saturates_and_keeps_sign() {
        let q = Quantizer::new(8, 1.0).unwrap();
        assert_eq!(q.quantize_value(1e6), 127.0);
        assert_eq!(q.quantize_value(-1e6), -127.0);
        assert_eq!(q.quantize_value(-0.2), -1.0);
        assert_eq!(q.quantize_value(2.6), 3.0);
        let zero = LlrVector::new(vec![0.0; 5]).unwrap();
        assert_eq!(quantize(&zero, 8).unwrap(), zero);
        assert!(quantize(&zero, 1).is_err());
        let q = Quantizer::for_sigma(8, 0.5).unwrap();
        assert_eq!(q.quantize_value(8.0), 64.0);
    }
}
