//! Edit-distance error rates, LID accuracy, checkpoint scoring, and
//! gender-stratified reporting.

mod bootstrap;

pub use bootstrap::{format_ci, paired_bootstrap, BootstrapResult};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::{Gender, Lang};

/// Minimum-cost alignment counts between a reference and a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EditCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

impl EditCounts {
    pub fn total(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

/// Levenshtein alignment with unit costs. Backtrace ties prefer substitution
/// over deletion over insertion, so the counts are deterministic.
pub fn edit_distance<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> EditCounts {
    let n = reference.len();
    let m = hypothesis.len();
    let mut dp = vec![0usize; (n + 1) * (m + 1)];
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    for i in 0..=n {
        dp[idx(i, 0)] = i;
    }
    for j in 0..=m {
        dp[idx(0, j)] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dp[idx(i - 1, j - 1)] + usize::from(reference[i - 1] != hypothesis[j - 1]);
            let del = dp[idx(i - 1, j)] + 1;
            let ins = dp[idx(i, j - 1)] + 1;
            dp[idx(i, j)] = sub.min(del).min(ins);
        }
    }

    let mut counts = EditCounts::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[idx(i, j)];
        if i > 0 && j > 0 {
            let matched = reference[i - 1] == hypothesis[j - 1];
            if here == dp[idx(i - 1, j - 1)] + usize::from(!matched) {
                if !matched {
                    counts.substitutions += 1;
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == dp[idx(i - 1, j)] + 1 {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }
    counts
}

/// Per-utterance scoring record: tokens plus minimum-alignment counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScoredPair {
    pub utterance_id: String,
    pub ref_tokens: Vec<String>,
    pub hyp_tokens: Vec<String>,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_len: usize,
}

impl ScoredPair {
    pub fn new(utterance_id: impl Into<String>, ref_tokens: Vec<String>, hyp_tokens: Vec<String>) -> Self {
        let counts = edit_distance(&ref_tokens, &hyp_tokens);
        let ref_len = ref_tokens.len();
        ScoredPair {
            utterance_id: utterance_id.into(),
            ref_tokens,
            hyp_tokens,
            substitutions: counts.substitutions,
            deletions: counts.deletions,
            insertions: counts.insertions,
            ref_len,
        }
    }

    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

/// Scores at the word level: tokens are whitespace-separated units.
pub fn score_words(id: impl Into<String>, reference: &str, hypothesis: &str) -> ScoredPair {
    let r: Vec<String> = reference.split_whitespace().map(String::from).collect();
    let h: Vec<String> = hypothesis.split_whitespace().map(String::from).collect();
    ScoredPair::new(id, r, h)
}

/// Scores at the character level: tokens are Unicode scalars of the trimmed
/// strings. Internal spaces count unless `count_spaces` is false.
pub fn score_chars(id: impl Into<String>, reference: &str, hypothesis: &str, count_spaces: bool) -> ScoredPair {
    let to_tokens = |s: &str| -> Vec<String> {
        s.trim()
            .chars()
            .filter(|c| count_spaces || !c.is_whitespace())
            .map(String::from)
            .collect()
    };
    ScoredPair::new(id, to_tokens(reference), to_tokens(hypothesis))
}

/// Micro-averaged error rate: `100 * sum(S+D+I) / sum(ref_len)`.
/// Can exceed 100 when insertions dominate.
pub fn error_rate(pairs: &[ScoredPair]) -> Result<f64> {
    let total_ref: usize = pairs.iter().map(|p| p.ref_len).sum();
    if total_ref == 0 {
        return Err(Error::ZeroReferenceLength);
    }
    let total_err: usize = pairs.iter().map(ScoredPair::errors).sum();
    Ok(100.0 * total_err as f64 / total_ref as f64)
}

/// Word error rate over word-level [`ScoredPair`]s.
pub fn wer(pairs: &[ScoredPair]) -> Result<f64> {
    error_rate(pairs)
}

/// Character error rate over character-level [`ScoredPair`]s.
pub fn cer(pairs: &[ScoredPair]) -> Result<f64> {
    error_rate(pairs)
}

/// Language-identification accuracy; a missing prediction counts as wrong.
pub fn lid_accuracy(pairs: &[(Lang, Option<Lang>)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let correct = pairs.iter().filter(|(t, p)| Some(*t) == *p).count();
    Ok(100.0 * correct as f64 / pairs.len() as f64)
}

/// Checkpoint-selection criterion: `0.5 * wer + 0.5 * cer` (as fractions).
pub fn checkpoint_score(wer: f64, cer: f64) -> f64 {
    0.5 * wer + 0.5 * cer
}

/// Per-language gender breakdown; `delta = male - female` where both exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderBreakdown {
    pub male_wer: Option<f64>,
    pub female_wer: Option<f64>,
    /// Positive values mean higher error for male speakers.
    pub delta: Option<f64>,
    pub n_male: usize,
    pub n_female: usize,
    pub n_unknown: usize,
    /// Diagnostic when a stratum is empty and no delta can be computed.
    pub note: Option<String>,
}

/// Micro WER per (language, gender) with per-language deltas.
/// Unknown-gender utterances are counted but excluded from both strata.
pub fn gender_strata(items: &[(Lang, Gender, ScoredPair)]) -> BTreeMap<Lang, GenderBreakdown> {
    let mut by_lang: BTreeMap<Lang, (Vec<&ScoredPair>, Vec<&ScoredPair>, usize)> = BTreeMap::new();
    for (lang, gender, pair) in items {
        let entry = by_lang.entry(*lang).or_default();
        match gender {
            Gender::Male => entry.0.push(pair),
            Gender::Female => entry.1.push(pair),
            Gender::Unknown => entry.2 += 1,
        }
    }
    by_lang
        .into_iter()
        .map(|(lang, (male, female, n_unknown))| {
            let rate = |pairs: &[&ScoredPair]| -> Option<f64> {
                let total_ref: usize = pairs.iter().map(|p| p.ref_len).sum();
                if total_ref == 0 {
                    return None;
                }
                let total_err: usize = pairs.iter().map(|p| p.errors()).sum();
                Some(100.0 * total_err as f64 / total_ref as f64)
            };
            let male_wer = rate(&male);
            let female_wer = rate(&female);
            let delta = match (male_wer, female_wer) {
                (Some(m), Some(f)) => Some(m - f),
                _ => None,
            };
            let note = if delta.is_none() {
                let missing = if male_wer.is_none() { "male" } else { "female" };
                Some(format!("no {missing} utterances with reference words; delta not computed"))
            } else {
                None
            };
            (
                lang,
                GenderBreakdown {
                    male_wer,
                    female_wer,
                    delta,
                    n_male: male.len(),
                    n_female: female.len(),
                    n_unknown,
                    note,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn edit_distance_examples() {
        let c = edit_distance(&toks("a b c"), &toks("a b c"));
        assert_eq!(c, EditCounts::default());

        let c = edit_distance(&toks("a b c"), &toks("a x c"));
        assert_eq!((c.substitutions, c.deletions, c.insertions), (1, 0, 0));

        let c = edit_distance(&toks("a b"), &toks("b"));
        assert_eq!((c.substitutions, c.deletions, c.insertions), (0, 1, 0));
    }

    #[test]
    fn edit_distance_empty_sides() {
        let c = edit_distance(&toks(""), &toks("a b"));
        assert_eq!((c.substitutions, c.deletions, c.insertions), (0, 0, 2));
        let c = edit_distance(&toks("a b"), &toks(""));
        assert_eq!((c.substitutions, c.deletions, c.insertions), (0, 2, 0));
    }

    #[test]
    fn substitution_preferred_on_ties() {
        // Both (2 subs) and (1 del + 1 ins) cost 2; substitution wins.
        let c = edit_distance(&toks("a b"), &toks("b a"));
        assert_eq!((c.substitutions, c.deletions, c.insertions), (2, 0, 0));
    }

    #[test]
    fn wer_examples() {
        let pairs = vec![score_words("u1", "a b", "a b")];
        assert_eq!(wer(&pairs).unwrap(), 0.0);

        // 3 spurious insertions over 2 reference words: 150%.
        let pairs = vec![score_words("u1", "a b", "a b x y z")];
        assert_eq!(wer(&pairs).unwrap(), 150.0);

        // Micro average: (1 error + 0) / (2 + 2) words.
        let pairs = vec![score_words("u1", "a b", "a x"), score_words("u2", "c d", "c d")];
        assert_eq!(wer(&pairs).unwrap(), 25.0);
    }

    #[test]
    fn wer_zero_reference_errors() {
        let pairs = vec![score_words("u1", "", "a")];
        assert!(matches!(wer(&pairs), Err(Error::ZeroReferenceLength)));
    }

    #[test]
    fn cer_examples() {
        let pairs = vec![score_chars("u1", "ab", "ab", true)];
        assert_eq!(cer(&pairs).unwrap(), 0.0);

        let pairs = vec![score_chars("u1", "ab", "ac", true)];
        assert_eq!(cer(&pairs).unwrap(), 50.0);

        // one deletion over three characters (space counts).
        let pairs = vec![score_chars("u1", "a b", "ab", true)];
        assert!((cer(&pairs).unwrap() - 100.0 / 3.0).abs() < 1e-12);

        // Space-free variant: identical after dropping the space.
        let pairs = vec![score_chars("u1", "a b", "ab", false)];
        assert_eq!(cer(&pairs).unwrap(), 0.0);
    }

    #[test]
    fn cer_trims_outer_whitespace() {
        let pairs = vec![score_chars("u1", " ab ", "ab", true)];
        assert_eq!(cer(&pairs).unwrap(), 0.0);
    }

    #[test]
    fn lid_examples() {
        let all: Vec<(Lang, Option<Lang>)> =
            Lang::ALL.iter().map(|&l| (l, Some(l))).collect();
        assert_eq!(lid_accuracy(&all).unwrap(), 100.0);

        let mut pairs = vec![(Lang::Amh, Some(Lang::Amh)); 9992];
        pairs.extend(vec![(Lang::Amh, Some(Lang::Tir)); 8]);
        assert_eq!(lid_accuracy(&pairs).unwrap(), 99.92);

        let pairs = vec![
            (Lang::Orm, Some(Lang::Orm)),
            (Lang::Orm, Some(Lang::Orm)),
            (Lang::Orm, Some(Lang::Orm)),
            (Lang::Orm, None),
        ];
        assert_eq!(lid_accuracy(&pairs).unwrap(), 75.0);
    }

    #[test]
    fn checkpoint_examples() {
        assert_eq!(checkpoint_score(0.4, 0.1), 0.25);
        assert_eq!(checkpoint_score(0.0, 0.0), 0.0);
        assert_eq!(checkpoint_score(1.0, 1.0), 1.0);
    }

    fn counted_pair(id: &str, errors: usize, ref_len: usize) -> ScoredPair {
        ScoredPair {
            utterance_id: id.into(),
            ref_tokens: Vec::new(),
            hyp_tokens: Vec::new(),
            substitutions: errors,
            deletions: 0,
            insertions: 0,
            ref_len,
        }
    }

    #[test]
    fn gender_delta_example() {
        let items = vec![
            (Lang::Amh, Gender::Male, counted_pair("m", 3208, 10000)),
            (Lang::Amh, Gender::Female, counted_pair("f", 3002, 10000)),
        ];
        let strata = gender_strata(&items);
        let amh = &strata[&Lang::Amh];
        assert!((amh.male_wer.unwrap() - 32.08).abs() < 1e-9);
        assert!((amh.female_wer.unwrap() - 30.02).abs() < 1e-9);
        assert!((amh.delta.unwrap() - 2.06).abs() < 1e-9);
        assert!(amh.note.is_none());
    }

    #[test]
    fn gender_identical_profiles_delta_zero() {
        let items = vec![
            (Lang::Sid, Gender::Male, counted_pair("m", 5, 50)),
            (Lang::Sid, Gender::Female, counted_pair("f", 5, 50)),
        ];
        assert_eq!(gender_strata(&items)[&Lang::Sid].delta, Some(0.0));
    }

    #[test]
    fn gender_empty_stratum_gives_null_delta() {
        let items = vec![
            (Lang::Wal, Gender::Female, counted_pair("f", 2, 40)),
            (Lang::Wal, Gender::Unknown, counted_pair("u", 1, 10)),
        ];
        let wal = &gender_strata(&items)[&Lang::Wal];
        assert_eq!(wal.delta, None);
        assert!(wal.note.as_deref().unwrap().contains("male"));
        assert_eq!(wal.n_unknown, 1);
    }
}
