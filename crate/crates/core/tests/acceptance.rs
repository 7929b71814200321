//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run all with `cargo test -p orbgrand --test acceptance`, or a subset with
//! `cargo test -p orbgrand --test acceptance -- 3 4`.

use std::panic::{self, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use orbgrand::channel::ChannelConfig;
use orbgrand::codes::LinearCode;
use orbgrand::decoder::{exact_order, ml_oracle, sort_reliability, Decoder};
use orbgrand::gf2::BinaryMatrix;
use orbgrand::lut_miner::{mine_pattern_counts, PatternCounts};
use orbgrand::pipeline::{
    bitonic_sort, embed_code, format_2dp, latency_cycles, latency_ns_exact, stage_count, throughput,
    PipelineConfig,
};
use orbgrand::schedule::{generate_ilwo, generate_la_ilwo, generate_lwo, PatternLut, Schedule};
use orbgrand::sim::{
    simulate, simulate_point, EmbeddedDecoder, FrameDecoder, FrameSource, HardDecisionCheck,
    ScheduledDecoder, SimOptions,
};
use orbgrand::LlrVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const Q_MAX: usize = 1 << 13;
const Q_S: usize = 512;
const Q_LUT: usize = 512;
const BCH_SNR: f64 = 5.75;
const PC_SNR: f64 = 7.4;
const MINING_SNR: f64 = 7.0;
const MINING_EVENTS: u64 = 10_000_000;

/// Outcome of one criterion: pass flag and a one-line summary.
type Outcome = (bool, String);

fn mined() -> &'static PatternCounts {
    static COUNTS: OnceLock<PatternCounts> = OnceLock::new();
    COUNTS.get_or_init(|| {
        let cfg = ChannelConfig::new(MINING_SNR, 1.0, 2024).unwrap();
        mine_pattern_counts(128, &cfg, MINING_EVENTS).unwrap()
    })
}

fn lut() -> PatternLut {
    mined().top(Q_LUT)
}

fn la_ilwo(n: usize) -> Schedule {
    generate_la_ilwo(&lut(), n, Q_MAX).unwrap()
}

fn opts(frames: u64, seed: u64) -> SimOptions {
    SimOptions {
        seed,
        max_frames: frames,
        min_frame_errors: 0,
        quantize_bits: None,
        stage_q_s: Some(Q_S),
    }
}

fn criterion_1() -> Outcome {
    let a = PipelineConfig {
        q_max: Q_MAX,
        q_s: 512,
        f_mhz: 616,
        ..PipelineConfig::default()
    };
    let c = PipelineConfig {
        q_s: 256,
        f_mhz: 701,
        ..a
    };
    let got = [
        stage_count(&a).unwrap().to_string(),
        latency_cycles(&a).unwrap().to_string(),
        format_2dp(&latency_ns_exact(&a).unwrap()),
        format_2dp(&throughput(&a, 127, 113).unwrap().bits_per_cycle),
        format_2dp(&throughput(&a, 127, 113).unwrap().gbps),
        stage_count(&c).unwrap().to_string(),
        latency_cycles(&c).unwrap().to_string(),
        format_2dp(&latency_ns_exact(&c).unwrap()),
        format_2dp(&throughput(&c, 127, 113).unwrap().gbps),
        format_2dp(&throughput(&a, 128, 105).unwrap().bits_per_cycle),
        format_2dp(&throughput(&a, 128, 105).unwrap().gbps),
        format_2dp(&throughput(&c, 128, 105).unwrap().gbps),
    ];
    let want = [
        "18", "25", "40.58", "113.00", "69.61", "34", "41", "58.49", "79.21", "105.00", "64.68", "73.61",
    ];
    (got == want, format!("got {got:?}"))
}

fn criterion_2() -> Outcome {
    let within = |count: usize, target: f64| ((count as f64 - target) / target).abs() <= 0.01;
    let t1 = 1.77 * f64::from(1u32 << 16);
    let t2 = 1.30 * f64::from(1u32 << 18);
    let c1 = generate_lwo(128, usize::MAX, Some(6), Some(64)).unwrap().len();
    let c2 = generate_lwo(128, usize::MAX, Some(8), Some(96)).unwrap().len();
    (
        within(c1, t1) && within(c2, t2),
        format!(
            "LW<=64,HW<=6: {c1} vs {t1:.0} ({:+.2}%); LW<=96,HW<=8: {c2} vs {t2:.0} ({:+.2}%)",
            100.0 * (c1 as f64 / t1 - 1.0),
            100.0 * (c2 as f64 / t2 - 1.0)
        ),
    )
}

fn criterion_3() -> Outcome {
    let bch = LinearCode::bch_127_113();
    let pc = LinearCode::polar_128_105();
    let o = SimOptions {
        stage_q_s: None,
        ..opts(1_000_000, 3)
    };
    let rb = simulate_point(&bch, &[&HardDecisionCheck(Decoder::for_code(&bch))], BCH_SNR, 0, &o).unwrap();
    let rp = simulate_point(&pc, &[&HardDecisionCheck(Decoder::for_code(&pc))], PC_SNR, 0, &o).unwrap();
    let (vb, vp) = (rb[0].hd_valid_rate(), rp[0].hd_valid_rate());
    (
        (vb - 0.54).abs() <= 0.01 && (vp - 0.84).abs() <= 0.01,
        format!(
            "BCH @ {BCH_SNR} dB: {vb:.4} (target 0.54 ± 0.01); PC @ {PC_SNR} dB: {vp:.4} (target 0.84 ± 0.01); {} frames each",
            rb[0].frames
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = PipelineConfig::default();
    let bch = LinearCode::bch_127_113();
    let pc = LinearCode::polar_128_105();
    let sb = la_ilwo(127);
    let sp = la_ilwo(128);
    let emb_b = embed_code(&cfg, &bch).unwrap();
    let emb_p = embed_code(&cfg, &pc).unwrap();
    let db = EmbeddedDecoder::new(&emb_b, &sb, Q_MAX + 1);
    let dp = EmbeddedDecoder::new(&emb_p, &sp, Q_MAX + 1);
    let stages = stage_count(&cfg).unwrap();
    let rb = simulate_point(&bch, &[&db], BCH_SNR, 0, &opts(1_000_000, 4)).unwrap().remove(0);
    let rp = simulate_point(&pc, &[&dp], PC_SNR, 0, &opts(1_000_000, 4)).unwrap().remove(0);
    let pb = rb.stages.as_ref().unwrap().profile(stages);
    let pp = rp.stages.as_ref().unwrap().profile(stages);
    let (a_b, a_p) = (pb.stage(2), pp.stage(2));
    (
        (0.0015..=0.0045).contains(&a_b) && a_p < 1e-4,
        format!(
            "BCH stage-2 activation {:.4}% (target 0.15..0.45%), stage-0 resolution {:.4}; PC stage-2 activation {:.5}% (target < 0.01%); {} frames each",
            100.0 * a_b,
            pb.resolved_at_stage0,
            100.0 * a_p,
            rb.frames
        ),
    )
}

fn random_code(rng: &mut impl Rng, n: usize, k: usize) -> LinearCode {
    loop {
        let g = BinaryMatrix::from_fn(k, n, |i, j| if j < k { i == j } else { rng.random() }).unwrap();
        if let Ok(c) = LinearCode::from_generator(format!("random({n},{k})"), g) {
            return c;
        }
    }
}

fn criterion_5() -> Outcome {
    let field = orbgrand::codes::GaloisField::new(4, 0x13).unwrap();
    let bch15 = orbgrand::codes::bch_build(4, 0x13, orbgrand::codes::bch_generator_poly(&field, 2)).unwrap();
    let rnd = random_code(&mut ChaCha8Rng::seed_from_u64(5), 16, 8);
    let mut summary = Vec::new();
    let mut ok = true;
    for code in [&bch15, &rnd] {
        let dec = Decoder::for_code(code);
        let src = FrameSource::new(code, 2.0, 5, 0, None).unwrap();
        let q_full = 1usize << code.n();
        let agree = (0..10_000u64)
            .into_par_iter()
            .filter(|&f| {
                let (_, y) = src.frame(f);
                let r = dec.decode_with(&y, exact_order(&y), q_full).unwrap();
                r.valid && r.codeword == ml_oracle(code, &y).unwrap()
            })
            .count();
        ok &= agree == 10_000;
        summary.push(format!("{}: {agree}/10000", code.name()));
    }
    (ok, summary.join("; "))
}

/// Per-frame error flags of several decoders on shared noise.
fn paired_errors(code: &LinearCode, decoders: &[&dyn FrameDecoder], snr: f64, frames: u64, seed: u64) -> Vec<Vec<bool>> {
    let src = FrameSource::new(code, snr, seed, 0, None).unwrap();
    (0..frames)
        .into_par_iter()
        .map(|f| {
            let (x, y) = src.frame(f);
            decoders
                .iter()
                .map(|d| !d.decode_frame(&y).unwrap().is_correct(&x))
                .collect()
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let pc = LinearCode::polar_128_105();
    let (s_la, s_il, s_lw) = (
        la_ilwo(128),
        generate_ilwo(128, Q_MAX).unwrap(),
        generate_lwo(128, Q_MAX, None, None).unwrap(),
    );
    let d_la = ScheduledDecoder::new(&pc, &s_la, Q_MAX + 1).unwrap();
    let d_il = ScheduledDecoder::new(&pc, &s_il, Q_MAX + 1).unwrap();
    let d_lw = ScheduledDecoder::new(&pc, &s_lw, Q_MAX + 1).unwrap();
    let snr = 5.5;
    let frames = 100_000;
    let flags = paired_errors(&pc, &[&d_la, &d_il, &d_lw], snr, frames, 6);
    let count = |i: usize| flags.iter().filter(|f| f[i]).count() as u64;
    let (e_la, e_il, e_lw) = (count(0), count(1), count(2));
    let lw_only = flags.iter().filter(|f| f[2] && !f[1]).count() as f64;
    let il_only = flags.iter().filter(|f| f[1] && !f[2]).count() as f64;
    let sd = (lw_only + il_only).sqrt();
    let bler = e_il as f64 / frames as f64;
    let gap = e_lw as f64 - e_il as f64;
    (
        (1e-3..=1e-2).contains(&bler) && e_la <= e_il && e_il <= e_lw && gap > 2.0 * sd,
        format!(
            "PC @ {snr} dB, {frames} frames: errors LA-iLWO {e_la} <= iLWO {e_il} <= LWO {e_lw}; LWO-iLWO {gap} vs 2·sd {:.1}; BLER(iLWO) {bler:.2e}",
            2.0 * sd
        ),
    )
}

fn criterion_7() -> Outcome {
    let pc = LinearCode::polar_128_105();
    let s = la_ilwo(128);
    let d = ScheduledDecoder::new(&pc, &s, Q_MAX + 1).unwrap();
    let snrs = [5.0, 6.0, 6.75, PC_SNR];
    let rows = simulate(&pc, &d, &snrs, &opts(200_000, 7)).unwrap();
    let q: Vec<f64> = rows.iter().map(|r| r.avg_queries()).collect();
    let monotone = q.windows(2).all(|w| w[1] <= w[0]);
    let last = *q.last().unwrap();
    (
        monotone && last < 2.0,
        format!("PC avg Q at {snrs:?} dB: {q:.4?} (monotone: {monotone}; last < 2.0)"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut full_ok, mut half_ok) = (0, 0);
    for case in 0..10_000 {
        let v: Vec<f64> = (0..128)
            .map(|_| {
                if case % 2 == 0 {
                    rng.random_range(-8.0..8.0)
                } else {
                    f64::from(rng.random_range(-7i32..=7))
                }
            })
            .collect();
        let y = LlrVector::new(v).unwrap();
        let reference = sort_reliability(&y);
        full_ok += usize::from(bitonic_sort(&y, false).unwrap() == reference);
        let pruned = bitonic_sort(&y, true).unwrap();
        half_ok += usize::from(pruned.perm.indices()[..64] == reference.perm.indices()[..64]);
    }
    let bch = LinearCode::bch_127_113();
    let emb = embed_code(&PipelineConfig::default(), &bch).unwrap();
    let s = la_ilwo(127);
    let full = EmbeddedDecoder::new(&emb, &s, Q_MAX + 1).with_bitonic(false).unwrap();
    let pruned = EmbeddedDecoder::new(&emb, &s, Q_MAX + 1).with_bitonic(true).unwrap();
    let r = simulate_point(&bch, &[&full, &pruned], BCH_SNR, 0, &opts(100_000, 8)).unwrap();
    let (cf, cp) = (r[0].bler_ci95(), r[1].bler_ci95());
    let overlap = cf.0 <= cp.1 && cp.0 <= cf.1;
    (
        full_ok == 10_000 && half_ok == 10_000 && overlap,
        format!(
            "full sort exact {full_ok}/10000; pruned lower half exact {half_ok}/10000; BLER full {:.2e} [{:.2e}, {:.2e}] vs pruned {:.2e} [{:.2e}, {:.2e}] over {} frames; avg Q {:.4} vs {:.4}",
            r[0].bler(), cf.0, cf.1, r[1].bler(), cp.0, cp.1, r[0].frames, r[0].avg_queries(), r[1].avg_queries()
        ),
    )
}

fn criterion_9() -> Outcome {
    let c = mined();
    let l = lut();
    let monotone = l.counts().windows(2).all(|w| w[0] >= w[1]);
    let top = l.patterns()[0].to_vec();
    (
        c.events == MINING_EVENTS && l.coverage() >= 0.99 && monotone && top == vec![0],
        format!(
            "{} events over {} frames, {} distinct patterns; top-{} coverage {:.5} (target >= 0.99); counts non-increasing: {monotone}; top pattern {:?}",
            c.events,
            c.frames,
            c.distinct(),
            l.len(),
            l.coverage(),
            l.patterns()[0]
        ),
    )
}

fn criterion_10() -> Outcome {
    let bch = LinearCode::bch_127_113();
    let emb = embed_code(&PipelineConfig::default(), &bch).unwrap();
    let s = la_ilwo(127);
    let direct = Decoder::for_code(&bch);
    let src = FrameSource::new(&bch, BCH_SNR, 10, 0, None).unwrap();
    let same = (0..10_000u64)
        .into_par_iter()
        .filter(|&f| {
            let (_, y) = src.frame(f);
            let a = emb.decode(&y, &s, Q_MAX + 1).unwrap();
            let b = direct.decode(&y, &s, Q_MAX + 1).unwrap();
            a.codeword == b.codeword && a.queries == b.queries && a.valid == b.valid
        })
        .count();
    (same == 10_000, format!("identical codeword and Q on {same}/10000 frames"))
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria: [Criterion; 10] = [
        (1, "formula reproduction", criterion_1),
        (2, "schedule-size cross-check", criterion_2),
        (3, "valid-HD rates", criterion_3),
        (4, "stage-2 activation", criterion_4),
        (5, "GRAND = ML identity", criterion_5),
        (6, "schedule-quality ordering", criterion_6),
        (7, "average-Q behavior", criterion_7),
        (8, "sorter equivalence", criterion_8),
        (9, "LUT mining", criterion_9),
        (10, "embedding transparency", criterion_10),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = match panic::catch_unwind(AssertUnwindSafe(run)) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {id:>2} ({name}): {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
