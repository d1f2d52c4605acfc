//! Corpus-level lexical complexity: vocabulary-growth curves and type-token
//! ratio at a fixed token budget.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Cumulative (token_count, type_count) samples along a token stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthCurve {
    pub points: Vec<(usize, usize)>,
}

impl GrowthCurve {
    /// `tokens,types` CSV with a header line, ready for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tokens,types\n");
        for (tokens, types) in &self.points {
            out.push_str(&format!("{tokens},{types}\n"));
        }
        out
    }
}

/// Records the cumulative distinct-type count after every `step` tokens and
/// at stream end. Tokens should already be normalized by the caller.
pub fn vocab_growth<I, S>(tokens: I, step: usize) -> Result<GrowthCurve>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    if step == 0 {
        return Err(Error::ZeroStep);
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut points = Vec::new();
    let mut count = 0usize;
    for token in tokens {
        seen.insert(token.into());
        count += 1;
        if count.is_multiple_of(step) {
            points.push((count, seen.len()));
        }
    }
    if count == 0 {
        return Err(Error::EmptyStream);
    }
    if points.last().map(|&(t, _)| t) != Some(count) {
        points.push((count, seen.len()));
    }
    Ok(GrowthCurve { points })
}

/// Type-token ratio over the first `budget` tokens of the stream.
pub fn ttr_at<I, S>(tokens: I, budget: usize) -> Result<f64>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut count = 0usize;
    for token in tokens {
        seen.insert(token.into());
        count += 1;
        if count == budget {
            return Ok(seen.len() as f64 / budget as f64);
        }
    }
    Err(Error::StreamTooShort {
        needed: budget,
        got: count,
    })
}
