//! Running a shorter code on an `N`-input decoder.

use crate::channel::LlrVector;
use crate::codes::LinearCode;
use crate::decoder::{DecodeResult, Decoder};
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::schedule::Schedule;

use super::{check_fit, BitonicNetwork, PipelineConfig};

/// A code placed in the top-left corner of the decoder's `H` memory.
#[derive(Clone, Debug)]
pub struct EmbeddedCode {
    n: usize,
    big_n: usize,
    pad_magnitude: f64,
    parity: BinaryMatrix,
    decoder: Decoder,
}

pub fn embed_code(cfg: &PipelineConfig, code: &LinearCode) -> Result<EmbeddedCode> {
    cfg.validate()?;
    check_fit(cfg, code.n(), code.k())?;
    let parity = code.parity().embedded(cfg.h_rows(), cfg.big_n)?;
    Ok(EmbeddedCode {
        n: code.n(),
        big_n: cfg.big_n,
        pad_magnitude: cfg.max_llr_magnitude(),
        decoder: Decoder::new(&parity),
        parity,
    })
}

impl EmbeddedCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    /// The zero-padded `N(1 − R_min) × N` parity-check matrix.
    pub fn parity(&self) -> &BinaryMatrix {
        &self.parity
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    /// Pads `y` to `N` with positive LLRs of maximum magnitude.
    ///
    /// The pad is `2^(B−1)−1`, raised to the frame's largest magnitude for
    /// unquantized input so that every pad sorts after the real positions.
    pub fn embed_llr(&self, y: &LlrVector) -> Result<LlrVector> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let pad = y
            .values()
            .iter()
            .fold(self.pad_magnitude, |m, v| m.max(v.abs()));
        let mut v = y.values().to_vec();
        v.resize(self.big_n, pad);
        LlrVector::new(v)
    }

    /// Decodes on the full-width matrix and returns the first `n` output bits.
    ///
    /// Schedules address the code's `n` sorted positions, so no pattern ever
    /// reaches a pad position.
    pub fn decode(&self, y: &LlrVector, schedule: &Schedule, q_max: usize) -> Result<DecodeResult> {
        self.decode_inner(y, schedule, q_max, None)
    }

    /// As [`EmbeddedCode::decode`], sorting with an explicit `N`-input network.
    pub fn decode_with_network(
        &self,
        y: &LlrVector,
        network: &BitonicNetwork,
        schedule: &Schedule,
        q_max: usize,
    ) -> Result<DecodeResult> {
        self.decode_inner(y, schedule, q_max, Some(network))
    }

    fn decode_inner(
        &self,
        y: &LlrVector,
        schedule: &Schedule,
        q_max: usize,
        network: Option<&BitonicNetwork>,
    ) -> Result<DecodeResult> {
        if schedule.n() > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: schedule.n(),
            });
        }
        let padded = self.embed_llr(y)?;
        let mut r = match network {
            None => self.decoder.decode(&padded, schedule, q_max)?,
            Some(net) => {
                let sort = net.sort(&padded)?;
                self.decoder
                    .decode_sorted(&padded.hard_decision(), &sort, schedule, q_max)?
            }
        };
        debug_assert!((self.n..self.big_n).all(|i| !r.codeword.get(i)));
        r.codeword = r.codeword.truncated(self.n);
        Ok(r)
    }
}
