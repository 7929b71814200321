//! Monte Carlo sweeps driven by an [`ExperimentConfig`].

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use orbgrand::pipeline::{embed_code, stage_count};
use orbgrand::{
    simulate_point, EmbeddedDecoder, ExactOrderDecoder, FrameDecoder, LinearCode, PointStats, Schedule,
    ScheduleKind, ScheduledDecoder, SimOptions,
};
use serde::{Deserialize, Serialize};

use crate::config::{build_schedule, ExperimentConfig, Sorter};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bler: f64,
    pub avg_queries: f64,
    pub bit_errors: u64,
    pub ber: f64,
    pub hd_valid_rate: f64,
    /// Fraction of frames reaching each pipeline stage; empty without a
    /// `[pipeline]` section.
    pub stage_activation: Vec<f64>,
    pub wall_time_s: f64,
}

impl SweepRow {
    pub fn from_stats(s: &PointStats, wall_time_s: f64, stages: usize) -> Self {
        SweepRow {
            snr_db: s.snr_db,
            frames: s.frames,
            frame_errors: s.frame_errors,
            bler: s.bler(),
            avg_queries: s.avg_queries(),
            bit_errors: s.bit_errors,
            ber: s.ber(),
            hd_valid_rate: s.hd_valid_rate(),
            stage_activation: s
                .stages
                .as_ref()
                .map(|h| h.profile(stages).rates)
                .unwrap_or_default(),
            wall_time_s,
        }
    }
}

/// Everything a sweep needs, built and checked before any frame is run.
pub struct Prepared {
    pub code: LinearCode,
    pub kind: ScheduleKind,
    pub schedule: Option<Schedule>,
}

pub fn prepare(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Prepared> {
    cfg.validate()?;
    let code = cfg.code.build(base_dir).context("building code")?;
    let kind = cfg.schedule_kind()?;
    let s = &cfg.schedule;
    let schedule = if kind == ScheduleKind::Exact {
        None
    } else {
        let lut_path = s.lut_path.as_ref().map(|p| base_dir.join(p));
        let q_lut = s.q_lut.or(cfg.pipeline.map(|p| p.q_lut));
        Some(
            build_schedule(
                kind,
                code.n(),
                Some(s.q_max),
                s.max_hw,
                s.max_lw,
                lut_path.as_deref().map(|p| (p, q_lut)),
            )
            .context("building schedule")?,
        )
    };
    Ok(Prepared { code, kind, schedule })
}

/// Runs the sweep; rows come back in config SNR order.
pub fn run_sweep(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Vec<SweepRow>> {
    let prep = prepare(cfg, base_dir)?;
    let code = &prep.code;
    let q_max = cfg.decoder_q_max();
    let embedded = cfg.pipeline.map(|p| embed_code(&p, code)).transpose()?;
    let decoder: Box<dyn FrameDecoder + '_> = match (&prep.schedule, &embedded) {
        (None, _) => Box::new(ExactOrderDecoder::new(code, q_max)?),
        (Some(sched), Some(emb)) => {
            let d = EmbeddedDecoder::new(emb, sched, q_max);
            Box::new(match cfg.schedule.sorter {
                Sorter::Stable => d,
                Sorter::Bitonic => d.with_bitonic(false)?,
                Sorter::Pruned => d.with_bitonic(true)?,
            })
        }
        (Some(sched), None) => {
            let d = ScheduledDecoder::new(code, sched, q_max)?;
            Box::new(match cfg.schedule.sorter {
                Sorter::Stable => d,
                Sorter::Bitonic => d.with_bitonic(false)?,
                Sorter::Pruned => d.with_bitonic(true)?,
            })
        }
    };
    let opts = SimOptions {
        seed: cfg.channel.seed,
        max_frames: cfg.stop.max_frames,
        min_frame_errors: cfg.stop.min_frame_errors,
        quantize_bits: cfg.channel.quantize_bits,
        stage_q_s: cfg.pipeline.map(|p| p.q_s),
    };
    let stages = cfg.pipeline.map(|p| stage_count(&p)).transpose()?.unwrap_or(0);
    cfg.channel
        .snr_list_db
        .iter()
        .enumerate()
        .map(|(i, &snr)| {
            let start = Instant::now();
            let stats = simulate_point(code, &[decoder.as_ref()], snr, i as u64, &opts)?.remove(0);
            Ok(SweepRow::from_stats(&stats, start.elapsed().as_secs_f64(), stages))
        })
        .collect()
}
