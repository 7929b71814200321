//! Experiment configuration files.
//!
//! A config is a TOML document with `version = 1` and the sections below.
//! Relative paths inside it resolve against the directory of the file.
//!
//! ```toml
//! version = 1
//!
//! [code]
//! builtin = "bch127"            # or a descriptor: type = "bch" | "polar5g" | "matrix"
//!
//! [schedule]
//! kind = "la-ilwo"              # hw | lwo | ilwo | la-ilwo | exact
//! q_max = 8192                  # scheduled patterns; the HD check is one more query
//! q_lut = 512
//! lut_path = "lut_7db.txt"
//! sorter = "stable"             # stable | bitonic | pruned
//!
//! [channel]
//! snr_list_db = [5.0, 5.5, 6.0]
//! seed = 1
//! quantize_bits = 8
//!
//! [stop]
//! max_frames = 1000000
//! min_frame_errors = 100
//!
//! [output]
//! path = "bch.csv"
//! format = "csv"                # csv | json
//!
//! [pipeline]                    # optional; decode through the N-wide embedding
//! q_s = 512
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use orbgrand::schedule::{generate_hw_order, generate_ilwo, generate_la_ilwo, generate_lwo};
use orbgrand::{load_lut, CodeDescriptor, LinearCode, PipelineConfig, Schedule, ScheduleKind};
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub code: CodeSection,
    pub schedule: ScheduleSection,
    pub channel: ChannelSection,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub pipeline: Option<PipelineConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodeSection {
    Builtin { builtin: String },
    Descriptor(CodeDescriptor),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub kind: String,
    pub q_max: usize,
    #[serde(default)]
    pub q_lut: Option<usize>,
    #[serde(default)]
    pub lut_path: Option<PathBuf>,
    #[serde(default)]
    pub max_hw: Option<usize>,
    #[serde(default)]
    pub max_lw: Option<u64>,
    #[serde(default)]
    pub sorter: Sorter,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sorter {
    #[default]
    Stable,
    Bitonic,
    Pruned,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub snr_list_db: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub quantize_bits: Option<u32>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopRule {
    pub max_frames: u64,
    pub min_frame_errors: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_frames: 1_000_000,
            min_frame_errors: 100,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown output format {other:?} (expected csv or json)"),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A builtin name, or the path of a TOML file holding a code descriptor.
pub fn resolve_code(arg: &str) -> Result<LinearCode> {
    if let Some(d) = CodeDescriptor::builtin(arg) {
        return Ok(d.build(Path::new("."))?);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("{arg:?} is neither a builtin code nor a readable descriptor file"))?;
    let section: CodeSection =
        toml::from_str(&text).with_context(|| format!("parsing code descriptor {}", path.display()))?;
    section.build(path.parent().unwrap_or(Path::new(".")))
}

impl CodeSection {
    pub fn build(&self, base_dir: &Path) -> Result<LinearCode> {
        let desc = match self {
            CodeSection::Builtin { builtin } => CodeDescriptor::builtin(builtin)
                .with_context(|| format!("unknown builtin code {builtin:?}"))?,
            CodeSection::Descriptor(d) => d.clone(),
        };
        Ok(desc.build(base_dir)?)
    }
}

/// Builds the schedule named by `kind` for length `n`.
///
/// `q_max` counts scheduled patterns. LWO with `q_max = None` enumerates
/// everything within the weight bounds.
pub fn build_schedule(
    kind: ScheduleKind,
    n: usize,
    q_max: Option<usize>,
    max_hw: Option<usize>,
    max_lw: Option<u64>,
    lut: Option<(&Path, Option<usize>)>,
) -> Result<Schedule> {
    let need = |q: Option<usize>| q.with_context(|| format!("schedule kind {kind} needs q_max"));
    Ok(match kind {
        ScheduleKind::Hw => generate_hw_order(n, need(q_max)?, max_hw.unwrap_or(n))?,
        ScheduleKind::Lwo => {
            if q_max.is_none() && (max_hw.is_none() || max_lw.is_none()) {
                bail!("unbounded lwo needs both max_hw and max_lw");
            }
            generate_lwo(n, q_max.unwrap_or(usize::MAX), max_hw, max_lw)?
        }
        ScheduleKind::Ilwo => generate_ilwo(n, need(q_max)?)?,
        ScheduleKind::LaIlwo => {
            let (path, q_lut) = lut.context("la-ilwo needs a LUT file")?;
            let mut table = load_lut(path).with_context(|| format!("reading LUT {}", path.display()))?;
            if let Some(q) = q_lut {
                table = table.truncated(q);
            }
            generate_la_ilwo(&table, n, need(q_max)?)?
        }
        ScheduleKind::Exact | ScheduleKind::Custom => {
            bail!("schedule kind {kind} is not a fixed schedule")
        }
    })
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config and rebases its relative paths on the file's directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            bail!("unsupported config version {} (expected {CONFIG_VERSION})", self.version);
        }
        if self.channel.snr_list_db.is_empty() {
            bail!("channel.snr_list_db is empty");
        }
        if let Some(s) = self.channel.snr_list_db.iter().find(|s| !s.is_finite()) {
            bail!("SNR {s} is not finite");
        }
        if self.stop.max_frames == 0 {
            bail!("stop.max_frames must be positive");
        }
        if self.schedule.q_max == 0 {
            bail!("schedule.q_max must be positive");
        }
        let kind = self.schedule_kind()?;
        if kind == ScheduleKind::LaIlwo && self.schedule.lut_path.is_none() {
            bail!("la-ilwo needs schedule.lut_path");
        }
        if kind == ScheduleKind::Exact && self.pipeline.is_some() {
            bail!("the exact schedule cannot run on the pipeline model");
        }
        if let Some(p) = &self.pipeline {
            p.validate()?;
            if p.q_max != self.schedule.q_max {
                bail!(
                    "pipeline.q_max = {} differs from schedule.q_max = {}",
                    p.q_max,
                    self.schedule.q_max
                );
            }
        }
        Ok(())
    }

    pub fn schedule_kind(&self) -> Result<ScheduleKind> {
        self.schedule
            .kind
            .parse::<ScheduleKind>()
            .map_err(|e| anyhow::anyhow!("schedule.kind: {e}"))
    }

    /// Decoder budget, counting the hard-decision query.
    pub fn decoder_q_max(&self) -> usize {
        self.schedule.q_max + 1
    }
}
