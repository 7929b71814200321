//! ORBGRAND decoding of short binary linear codes: GF(2) algebra, reference
//! codes, an AWGN channel, logistic-weight schedules with LUT aid, the
//! abandoning guess-and-check decoder, and a model of its pipelined hardware.

pub mod channel;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod lut_miner;
pub mod pipeline;
pub mod schedule;
pub mod sim;

pub use channel::{sigma_from_snr, AwgnChannel, ChannelConfig, LlrVector, Quantizer};
pub use codes::{CodeDescriptor, LinearCode};
pub use decoder::{decode, ml_oracle, sort_reliability, DecodeResult, Decoder, SortResult};
pub use error::{Error, Result};
pub use gf2::{BinaryMatrix, BitVector, Permutation};
pub use lut_miner::{load_lut, mine_patterns, save_lut};
pub use pipeline::{ActivationProfile, PipelineConfig};
pub use schedule::{ErrorPattern, PatternLut, Schedule, ScheduleKind};
pub use sim::{
    simulate, simulate_point, EmbeddedDecoder, ExactOrderDecoder, FrameDecoder, FrameSource,
    HardDecisionCheck, PointStats, ScheduledDecoder, SimOptions,
};
