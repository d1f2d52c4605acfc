//! CTC likelihood, path collapse, greedy decoding, and an enumeration oracle.
//!
//! All probability math is in natural-log space; `-inf` is the zero-probability
//! sentinel and propagates through [`log_sum_exp`].

mod logits;

pub use logits::{LogitMatrix, ROW_TOLERANCE};

use crate::error::{Error, Result};
use crate::lang::Lang;
use crate::vocab::{GraphemeVocab, TargetSequence};

/// `log(sum(exp(x)))` over a slice, returning `-inf` for an all-`-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

fn lse2(a: f64, b: f64) -> f64 {
    log_sum_exp(&[a, b])
}

/// Log-likelihood of `target` under the CTC model: `log sum_paths P(path)`
/// over every frame-level path that collapses to the flat label sequence
/// `[lang_id, g1, ..., gN]`.
///
/// Returns `-inf` (not an error) when no valid alignment exists, e.g. when
/// `T` is shorter than the target plus the blanks required between repeats.
pub fn ctc_log_likelihood(logits: &LogitMatrix, target: &TargetSequence) -> Result<f64> {
    ctc_log_likelihood_flat(logits, &target.flat(), 0)
}

/// Forward recursion over the blank-interleaved label sequence.
pub fn ctc_log_likelihood_flat(logits: &LogitMatrix, labels: &[usize], blank_id: usize) -> Result<f64> {
    let classes = logits.vocab_size();
    for &l in labels {
        if l >= classes {
            return Err(Error::TargetIdOutOfRange { id: l, classes });
        }
        if l == blank_id {
            return Err(Error::BlankInTarget(l));
        }
    }

    // Extended sequence: blank, l1, blank, l2, ..., lN, blank.
    let ext_len = 2 * labels.len() + 1;
    let ext = |s: usize| -> usize {
        if s.is_multiple_of(2) {
            blank_id
        } else {
            labels[s / 2]
        }
    };

    let frames = logits.frames();
    let mut alpha = vec![f64::NEG_INFINITY; ext_len];
    alpha[0] = logits.get(0, blank_id);
    if ext_len > 1 {
        alpha[1] = logits.get(0, ext(1));
    }

    let mut next = vec![f64::NEG_INFINITY; ext_len];
    for t in 1..frames {
        for s in 0..ext_len {
            let label = ext(s);
            let mut acc = alpha[s];
            if s >= 1 {
                acc = lse2(acc, alpha[s - 1]);
            }
            if s >= 2 && label != blank_id && label != ext(s - 2) {
                acc = lse2(acc, alpha[s - 2]);
            }
            next[s] = logits.get(t, label) + acc;
        }
        std::mem::swap(&mut alpha, &mut next);
    }

    let total = if ext_len == 1 {
        alpha[0]
    } else {
        lse2(alpha[ext_len - 1], alpha[ext_len - 2])
    };
    // Row normalization is only enforced to ROW_TOLERANCE, which admits a sliver
    // of probability mass above 1; clamp the float dust so the result stays a
    // log-probability.
    Ok(total.min(0.0))
}

/// Collapses a frame-level path: merge consecutive duplicates, then drop blanks.
pub fn collapse_path(path: &[usize], blank_id: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev: Option<usize> = None;
    for &id in path {
        if prev != Some(id) && id != blank_id {
            out.push(id);
        }
        prev = Some(id);
    }
    out
}

/// Maximum number of paths [`ctc_brute_force`] will enumerate.
pub const ENUMERATION_GUARD: f64 = 1e7;

/// Exhaustive-enumeration oracle for [`ctc_log_likelihood`]: sums the
/// probability of every one of the `V^T` paths whose collapse equals the
/// target. Only feasible for desk-scale inputs (`V^T <= 1e7`).
pub fn ctc_brute_force(logits: &LogitMatrix, target: &TargetSequence) -> Result<f64> {
    ctc_brute_force_flat(logits, &target.flat(), 0)
}

pub fn ctc_brute_force_flat(logits: &LogitMatrix, labels: &[usize], blank_id: usize) -> Result<f64> {
    let classes = logits.vocab_size();
    for &l in labels {
        if l >= classes {
            return Err(Error::TargetIdOutOfRange { id: l, classes });
        }
        if l == blank_id {
            return Err(Error::BlankInTarget(l));
        }
    }
    let frames = logits.frames();
    let total_paths = (classes as f64).powi(frames as i32);
    if total_paths > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge { paths: total_paths });
    }

    let mut path = vec![0usize; frames];
    let mut terms: Vec<f64> = Vec::new();
    loop {
        if collapse_path(&path, blank_id) == labels {
            let logp: f64 = path.iter().enumerate().map(|(t, &v)| logits.get(t, v)).sum();
            terms.push(logp);
        }
        // Odometer increment over base-`classes` digits.
        let mut pos = 0;
        loop {
            if pos == frames {
                return Ok(log_sum_exp(&terms).min(0.0));
            }
            path[pos] += 1;
            if path[pos] < classes {
                break;
            }
            path[pos] = 0;
            pos += 1;
        }
    }
}

/// Result of greedy CTC decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyDecode {
    /// Language reported by a leading language token, if any.
    pub lang: Option<Lang>,
    /// Decoded text after collapse (language token stripped when leading).
    pub text: String,
    /// Per-frame argmax ids before collapse.
    pub raw_ids: Vec<usize>,
    /// True when a language token appeared in a non-initial position; such
    /// tokens are rendered literally into `text`.
    pub misplaced_lid: bool,
}

/// Greedy (best-path) decoding: per-frame argmax with ties broken toward the
/// lowest id, collapsed, then a leading language token is stripped.
pub fn greedy_decode(logits: &LogitMatrix, vocab: &GraphemeVocab) -> Result<GreedyDecode> {
    if logits.vocab_size() != vocab.size() {
        return Err(Error::VocabSizeMismatch {
            logits: logits.vocab_size(),
            vocab: vocab.size(),
        });
    }
    let raw_ids: Vec<usize> = (0..logits.frames())
        .map(|t| {
            let row = logits.row(t);
            let mut best = 0usize;
            for (i, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect();

    let collapsed = collapse_path(&raw_ids, vocab.blank_id());
    let mut lang = None;
    let mut misplaced_lid = false;
    let mut text = String::new();
    for (position, &id) in collapsed.iter().enumerate() {
        match vocab.lang_of_id(id) {
            Some(l) if position == 0 => lang = Some(l),
            Some(l) => {
                misplaced_lid = true;
                text.push_str(l.token());
            }
            None => text.push_str(vocab.symbol(id).expect("id < vocab size")),
        }
    }
    Ok(GreedyDecode {
        lang,
        text,
        raw_ids,
        misplaced_lid,
    })
}
