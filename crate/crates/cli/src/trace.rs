//! Query-by-query replay of a single frame.

use std::fmt::Write as _;

use anyhow::{ensure, Result};
use orbgrand::{sort_reliability, DecodeResult, ErrorPattern, LinearCode, LlrVector};

#[derive(Clone, Debug, PartialEq)]
pub struct QueryStep {
    /// 1-based query number; query 1 is the hard decision itself.
    pub query: usize,
    pub pattern: ErrorPattern,
    /// Flipped natural positions.
    pub flipped: Vec<usize>,
    pub valid: bool,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub order: Vec<usize>,
    pub steps: Vec<QueryStep>,
    /// Queries spent; equals `steps.len()`.
    pub queries: usize,
    pub valid: bool,
}

/// Replays decoding with a full syndrome check per query.
///
/// Independent of the incremental decoder, so the two can be compared.
pub fn trace_frame<I>(code: &LinearCode, y: &LlrVector, patterns: I, q_max: usize) -> Result<Trace>
where
    I: IntoIterator<Item = ErrorPattern>,
{
    ensure!(y.len() == code.n(), "frame has {} LLRs, code length is {}", y.len(), code.n());
    ensure!(q_max >= 1, "q_max must be at least 1");
    let order = sort_reliability(y).perm.indices().to_vec();
    let hd = y.hard_decision();
    let mut steps = vec![QueryStep {
        query: 1,
        pattern: ErrorPattern::empty(),
        flipped: Vec::new(),
        valid: code.is_codeword(&hd)?,
    }];
    if !steps[0].valid {
        for pattern in patterns.into_iter().take(q_max - 1) {
            let mut c = hd.clone();
            let flipped: Vec<usize> = pattern.to_vec().iter().map(|&j| order[j]).collect();
            for &i in &flipped {
                c.flip(i);
            }
            let valid = code.is_codeword(&c)?;
            steps.push(QueryStep {
                query: steps.len() + 1,
                pattern,
                flipped,
                valid,
            });
            if valid {
                break;
            }
        }
    }
    let valid = steps.last().is_some_and(|s| s.valid);
    Ok(Trace {
        order,
        queries: steps.len(),
        steps,
        valid,
    })
}

impl Trace {
    /// Whether the replay agrees with a decoder result.
    pub fn agrees_with(&self, r: &DecodeResult) -> bool {
        self.valid == r.valid && self.queries == r.queries
    }

    /// Human-readable listing, printing at most `limit` queries.
    pub fn render(&self, y: &LlrVector, limit: usize) -> String {
        let mut s = String::new();
        let shown = self.order.len().min(16);
        let head: Vec<String> = self.order[..shown]
            .iter()
            .map(|&i| format!("{i}({:+.3})", y.values()[i]))
            .collect();
        let more = if shown < self.order.len() { " ..." } else { "" };
        let _ = writeln!(s, "least reliable first: {}{more}", head.join(" "));
        for st in self.steps.iter().take(limit) {
            let _ = writeln!(
                s,
                "query {:>6}: pattern {:?} flips {:?} -> {}",
                st.query,
                st.pattern,
                st.flipped,
                if st.valid { "codeword" } else { "rejected" }
            );
        }
        if self.steps.len() > limit {
            let _ = writeln!(s, "... {} more queries", self.steps.len() - limit);
        }
        s
    }
}
