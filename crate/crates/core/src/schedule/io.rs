//! Text formats for schedules and LUTs.
//!
//! Both start with a header `n q count`, followed by one pattern per line as
//! space-separated ascending indices. LUT lines end with the observed count,
//! and a LUT may carry `# key=value` metadata lines right after the header.

use std::io::{BufRead, Write};

use super::{ErrorPattern, LutMeta, PatternLut, Schedule, ScheduleKind};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn write_indices<W: Write>(w: &mut W, p: &ErrorPattern) -> std::io::Result<()> {
    for (i, v) in p.indices().iter().enumerate() {
        if i > 0 {
            w.write_all(b" ")?;
        }
        write!(w, "{v}")?;
    }
    Ok(())
}

pub fn write_schedule<W: Write>(schedule: &Schedule, mut w: W) -> Result<()> {
    writeln!(w, "{} {} {}", schedule.n(), schedule.q_max(), schedule.len())?;
    for p in schedule {
        write_indices(&mut w, p)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_lut<W: Write>(lut: &PatternLut, mut w: W) -> Result<()> {
    let meta = lut.meta();
    writeln!(w, "{} {} {}", meta.n, meta.requested, lut.len())?;
    if let Some(snr) = meta.snr_db {
        writeln!(w, "# snr_db={snr}")?;
    }
    if let Some(rate) = meta.rate {
        writeln!(w, "# rate={rate}")?;
    }
    writeln!(w, "# events={}", meta.events_observed)?;
    if let Some(d) = meta.distinct_observed {
        writeln!(w, "# distinct={d}")?;
    }
    for (p, c) in lut.patterns().iter().zip(lut.counts()) {
        write_indices(&mut w, p)?;
        writeln!(w, " {c}")?;
    }
    w.flush()?;
    Ok(())
}

struct Header {
    n: usize,
    q: usize,
    count: usize,
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| parse_err(line, format!("bad number {t:?}: {e}")))
        })
        .collect()
}

fn read_lines<R: BufRead>(r: R) -> Result<Vec<(usize, String)>> {
    r.lines()
        .enumerate()
        .map(|(i, l)| Ok((i + 1, l?)))
        .collect()
}

fn parse_header(lines: &[(usize, String)]) -> Result<Header> {
    let Some((line, text)) = lines.first() else {
        return Err(parse_err(1, "missing header"));
    };
    match parse_numbers(*line, text)?[..] {
        [n, q, count] => Ok(Header { n, q, count }),
        _ => Err(parse_err(*line, format!("header must be `n q count`, got {text:?}"))),
    }
}

fn check_count(header: &Header, got: usize, last_line: usize) -> Result<()> {
    if got != header.count {
        return Err(parse_err(
            last_line,
            format!("header announces {} patterns, found {got}", header.count),
        ));
    }
    Ok(())
}

pub fn read_schedule<R: BufRead>(r: R) -> Result<Schedule> {
    let lines = read_lines(r)?;
    let header = parse_header(&lines)?;
    let mut patterns = Vec::with_capacity(header.count);
    for (line, text) in &lines[1..] {
        let idx = parse_numbers(*line, text)?;
        if idx.is_empty() {
            return Err(parse_err(*line, "empty pattern"));
        }
        let p = ErrorPattern::new_within(&idx, header.n).map_err(|e| parse_err(*line, e.to_string()))?;
        patterns.push(p);
    }
    check_count(&header, patterns.len(), lines.len())?;
    Schedule::new(header.n, ScheduleKind::Custom, header.q, patterns)
        .map_err(|e| parse_err(1, e.to_string()))
}

pub fn read_lut<R: BufRead>(r: R) -> Result<PatternLut> {
    let lines = read_lines(r)?;
    if lines.iter().all(|(_, l)| l.trim().is_empty()) {
        return Ok(PatternLut::empty(0));
    }
    let header = parse_header(&lines)?;
    let mut meta = LutMeta {
        n: header.n,
        requested: header.q,
        ..LutMeta::default()
    };
    let mut patterns = Vec::with_capacity(header.count);
    let mut counts = Vec::with_capacity(header.count);
    for (line, text) in &lines[1..] {
        if let Some(kv) = text.strip_prefix('#') {
            let Some((k, v)) = kv.trim().split_once('=') else {
                continue;
            };
            let bad = |_| parse_err(*line, format!("bad value for {k}: {v:?}"));
            match k.trim() {
                "snr_db" => meta.snr_db = Some(v.trim().parse().map_err(bad)?),
                "rate" => meta.rate = Some(v.trim().parse().map_err(bad)?),
                "events" => {
                    meta.events_observed = v
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(*line, format!("bad event count {v:?}")))?
                }
                "distinct" => {
                    meta.distinct_observed = Some(
                        v.trim()
                            .parse()
                            .map_err(|_| parse_err(*line, format!("bad distinct count {v:?}")))?,
                    )
                }
                _ => {}
            }
            continue;
        }
        let mut nums = parse_numbers(*line, text)?;
        let Some(count) = nums.pop() else {
            return Err(parse_err(*line, "empty LUT line"));
        };
        if nums.is_empty() {
            return Err(parse_err(*line, "LUT line has a count but no indices"));
        }
        let p = ErrorPattern::new_within(&nums, header.n).map_err(|e| parse_err(*line, e.to_string()))?;
        if counts.last().is_some_and(|&prev| prev < count as u64) {
            return Err(parse_err(*line, "counts must be non-increasing"));
        }
        patterns.push(p);
        counts.push(count as u64);
    }
    check_count(&header, patterns.len(), lines.len())?;
    PatternLut::new(patterns, counts, meta).map_err(|e| parse_err(1, e.to_string()))
}
