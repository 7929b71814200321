use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use orbgrand::channel::frame_rng;
use orbgrand::decoder::exact_order;
use orbgrand::lut_miner::mine_pattern_counts;
use orbgrand::pipeline::{
    embed_code, format_2dp, latency_cycles, latency_ns_exact, stage_count, throughput,
};
use orbgrand::schedule::write_schedule;
use orbgrand::{
    save_lut, simulate_point, BitVector, ChannelConfig, Decoder, EmbeddedDecoder, FrameDecoder,
    FrameSource, LlrVector, PipelineConfig, ScheduleKind, SimOptions,
};
use orbgrand_cli::config::{build_schedule, resolve_code};
use orbgrand_cli::trace::trace_frame;
use orbgrand_cli::{emit_results, run_sweep, ExperimentConfig, Format};
use rand::Rng;

#[derive(Parser)]
#[command(name = "orbgrand", version, about = "ORBGRAND decoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BLER / average-Q sweep from an experiment config.
    Sweep(SweepArgs),
    /// Mine the most frequent sorted-position error patterns.
    MineLut(MineArgs),
    /// Write a schedule file.
    DumpSchedule(DumpArgs),
    /// Latency, throughput and stage activation of the pipelined decoder.
    PipelineReport(ReportArgs),
    /// Encode one message.
    Encode(EncodeArgs),
    /// Decode one frame, listing every query.
    DecodeFrame(DecodeArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_delimiter = ',')]
    snr_db: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    #[arg(long)]
    quantize_bits: Option<u32>,
    /// Output file; overrides `[output] path`. `-` writes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 7.0)]
    snr_db: f64,
    /// Code rate used for the Eb/N0 noise scaling.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long, default_value_t = 10_000_000)]
    events: u64,
    #[arg(long, default_value_t = 512)]
    q_lut: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScheduleArgs {
    /// hw, lwo, ilwo or la-ilwo.
    #[arg(long, default_value = "ilwo")]
    kind: String,
    /// Scheduled patterns, not counting the hard-decision check. LWO with
    /// both weight bounds may leave it unset.
    #[arg(long)]
    q_max: Option<usize>,
    #[arg(long)]
    max_hw: Option<usize>,
    #[arg(long)]
    max_lw: Option<u64>,
    #[arg(long)]
    lut: Option<PathBuf>,
    #[arg(long)]
    q_lut: Option<usize>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// TOML file with pipeline parameters; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin code name or descriptor file.
    #[arg(long)]
    code: String,
    #[arg(long)]
    snr_db: f64,
    #[arg(long, default_value_t = 100_000)]
    frames: u64,
    /// LUT for LA-iLWO; plain iLWO without it.
    #[arg(long)]
    lut: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Quantize LLRs to the pipeline's `b` bits.
    #[arg(long)]
    quantize: bool,
    #[arg(long, value_enum, default_value = "stable")]
    sorter: SorterArg,
    /// Also write the report as `quantity,value` CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SorterArg {
    Stable,
    Bitonic,
    Pruned,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    code: String,
    /// Message bits as a 0/1 string.
    #[arg(long, conflicts_with = "random")]
    message: Option<String>,
    /// Draw a random message from `--seed`.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: String,
    /// Comma-separated LLRs.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    llr: Option<Vec<f64>>,
    /// File of whitespace- or comma-separated LLRs.
    #[arg(long, conflicts_with = "llr")]
    llr_file: Option<PathBuf>,
    /// Simulate a frame at this SNR instead of reading LLRs.
    #[arg(long, conflicts_with_all = ["llr", "llr_file"])]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    frame: u64,
    /// hw, lwo, ilwo, la-ilwo or exact.
    #[arg(long, default_value = "ilwo")]
    kind: String,
    #[arg(long, default_value_t = 8192)]
    q_max: usize,
    #[arg(long)]
    max_hw: Option<usize>,
    #[arg(long)]
    max_lw: Option<u64>,
    #[arg(long)]
    lut: Option<PathBuf>,
    #[arg(long)]
    q_lut: Option<usize>,
    /// Queries to list.
    #[arg(long, default_value_t = 32)]
    trace: usize,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::MineLut(a) => mine_lut(a),
        Command::DumpSchedule(a) => dump_schedule(a),
        Command::PipelineReport(a) => pipeline_report(a),
        Command::Encode(a) => encode(a),
        Command::DecodeFrame(a) => decode_frame(a),
    }
}

fn sweep(a: SweepArgs) -> Result<()> {
    let (mut cfg, base) = ExperimentConfig::load(&a.config)?;
    if let Some(s) = a.snr_db {
        cfg.channel.snr_list_db = s;
    }
    if let Some(s) = a.seed {
        cfg.channel.seed = s;
    }
    if let Some(m) = a.max_frames {
        cfg.stop.max_frames = m;
    }
    if let Some(m) = a.min_frame_errors {
        cfg.stop.min_frame_errors = m;
    }
    if a.quantize_bits.is_some() {
        cfg.channel.quantize_bits = a.quantize_bits;
    }
    if let Some(f) = a.format {
        cfg.output.format = f;
    }
    cfg.validate()?;
    let out = match a.out {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) => Some(p),
        None => cfg.output.path.as_ref().map(|p| base.join(p)),
    };
    if let Some(p) = &out {
        // Fail on a bad output path before spending time on frames.
        File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
    }
    let rows = run_sweep(&cfg, &base)?;
    emit_results(&rows, cfg.output.format, out.as_deref())
}

fn mine_lut(a: MineArgs) -> Result<()> {
    if a.q_lut == 0 {
        bail!("--q-lut must be at least 1");
    }
    let cfg = ChannelConfig::new(a.snr_db, a.rate, a.seed)?;
    let counts = mine_pattern_counts(a.n, &cfg, a.events)?;
    let lut = counts.top(a.q_lut);
    save_lut(&lut, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!(
        "{} events over {} frames, {} distinct patterns; kept {} (coverage {:.6})",
        counts.events,
        counts.frames,
        counts.distinct(),
        lut.len(),
        lut.coverage()
    );
    if lut.is_short() {
        eprintln!("warning: fewer than {} distinct patterns were observed", a.q_lut);
    }
    Ok(())
}

fn parse_kind(kind: &str) -> Result<ScheduleKind> {
    kind.parse::<ScheduleKind>().map_err(|e| anyhow::anyhow!("--kind: {e}"))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn dump_schedule(a: DumpArgs) -> Result<()> {
    let s = &a.schedule;
    let kind = parse_kind(&s.kind)?;
    let schedule = build_schedule(
        kind,
        a.n,
        s.q_max,
        s.max_hw,
        s.max_lw,
        s.lut.as_deref().map(|p| (p, s.q_lut)),
    )?;
    write_schedule(&schedule, writer(a.out.as_deref())?)?;
    eprintln!("{} patterns", schedule.len());
    Ok(())
}

fn pipeline_report(a: ReportArgs) -> Result<()> {
    let cfg: PipelineConfig = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => PipelineConfig::default(),
    };
    cfg.validate()?;
    let code = resolve_code(&a.code)?;
    let stages = stage_count(&cfg)?;
    let cycles = latency_cycles(&cfg)?;
    let ns = latency_ns_exact(&cfg)?;
    let tp = throughput(&cfg, code.n(), code.k())?;
    let emb = embed_code(&cfg, &code)?;
    let kind = if a.lut.is_some() { ScheduleKind::LaIlwo } else { ScheduleKind::Ilwo };
    let schedule = build_schedule(
        kind,
        code.n(),
        Some(cfg.q_max),
        None,
        None,
        a.lut.as_deref().map(|p| (p, Some(cfg.q_lut))),
    )?;
    let d = EmbeddedDecoder::new(&emb, &schedule, cfg.q_max + 1);
    let d = match a.sorter {
        SorterArg::Stable => d,
        SorterArg::Bitonic => d.with_bitonic(false)?,
        SorterArg::Pruned => d.with_bitonic(true)?,
    };
    let opts = SimOptions {
        seed: a.seed,
        max_frames: a.frames,
        min_frame_errors: 0,
        quantize_bits: a.quantize.then_some(cfg.b),
        stage_q_s: Some(cfg.q_s),
    };
    let stats = simulate_point(&code, &[&d as &dyn FrameDecoder], a.snr_db, 0, &opts)?.remove(0);
    let profile = stats
        .stages
        .as_ref()
        .expect("stage attribution was requested")
        .profile(stages);

    let mut report: Vec<(String, String)> = vec![
        ("code".into(), code.name().to_string()),
        ("schedule".into(), kind.label().to_string()),
        ("big_n".into(), cfg.big_n.to_string()),
        ("q_max".into(), cfg.q_max.to_string()),
        ("q_s".into(), cfg.q_s.to_string()),
        ("f_mhz".into(), cfg.f_mhz.to_string()),
        ("stage_count".into(), stages.to_string()),
        ("latency_cycles".into(), cycles.to_string()),
        ("latency_ns".into(), format_2dp(&ns)),
        ("bits_per_cycle".into(), format_2dp(&tp.bits_per_cycle)),
        ("throughput_gbps".into(), format_2dp(&tp.gbps)),
        ("snr_db".into(), a.snr_db.to_string()),
        ("frames".into(), stats.frames.to_string()),
        ("bler".into(), stats.bler().to_string()),
        ("avg_queries".into(), stats.avg_queries().to_string()),
        ("hd_valid_rate".into(), stats.hd_valid_rate().to_string()),
    ];
    for (t, r) in profile.rates.iter().enumerate() {
        report.push((format!("stage_{t}_activation"), r.to_string()));
    }
    let width = report.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &report {
        println!("{k:<width$}  {v}");
    }
    if let Some(p) = &a.csv {
        let mut w = csv::Writer::from_writer(writer(Some(p))?);
        w.write_record(["quantity", "value"])?;
        for (k, v) in &report {
            w.write_record([k, v])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn encode(a: EncodeArgs) -> Result<()> {
    let code = resolve_code(&a.code)?;
    let u = match (&a.message, a.random) {
        (Some(m), _) => BitVector::parse(m)?,
        (None, true) => {
            let mut rng = frame_rng(a.seed, 0, 0);
            BitVector::from_bools((0..code.k()).map(|_| rng.random::<bool>()))
        }
        (None, false) => bail!("give --message or --random"),
    };
    if u.len() != code.k() {
        bail!("message has {} bits, {} needs {}", u.len(), code.name(), code.k());
    }
    println!("{}", code.encode(&u)?);
    Ok(())
}

fn read_llrs(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad LLR {t:?}")))
        .collect()
}

fn decode_frame(a: DecodeArgs) -> Result<()> {
    let code = resolve_code(&a.code)?;
    let (truth, y) = match (&a.llr, &a.llr_file, a.snr_db) {
        (Some(v), _, _) => (None, LlrVector::new(v.clone())?),
        (_, Some(p), _) => (None, LlrVector::new(read_llrs(p)?)?),
        (_, _, Some(snr)) => {
            let (x, y) = FrameSource::new(&code, snr, a.seed, 0, None)?.frame(a.frame);
            (Some(x), y)
        }
        _ => bail!("give --llr, --llr-file or --snr-db"),
    };
    if y.len() != code.n() {
        bail!("frame has {} LLRs, {} has length {}", y.len(), code.name(), code.n());
    }
    let kind = parse_kind(&a.kind)?;
    let q_max = a.q_max + 1;
    let decoder = Decoder::for_code(&code);
    let (trace, result) = if kind == ScheduleKind::Exact {
        (
            trace_frame(&code, &y, exact_order(&y), q_max)?,
            decoder.decode_with(&y, exact_order(&y), q_max)?,
        )
    } else {
        let s = build_schedule(
            kind,
            code.n(),
            Some(a.q_max),
            a.max_hw,
            a.max_lw,
            a.lut.as_deref().map(|p| (p, a.q_lut)),
        )?;
        (
            trace_frame(&code, &y, s.patterns().iter().cloned(), q_max)?,
            decoder.decode(&y, &s, q_max)?,
        )
    };
    print!("{}", trace.render(&y, a.trace));
    println!(
        "result: {} after {} queries{}",
        if result.valid { "codeword" } else { "abandoned" },
        result.queries,
        if result.schedule_exhausted { " (schedule exhausted)" } else { "" }
    );
    println!("codeword: {}", result.codeword);
    if let Some(x) = truth {
        println!("transmitted: {x}");
        println!("correct: {}", result.is_correct(&x));
    }
    if !trace.agrees_with(&result) {
        bail!("trace replay disagrees with the decoder");
    }
    Ok(())
}
