//! Paired bootstrap significance test for comparing two systems on the same
//! utterance set.
//!
//! Utterance ids are resampled with replacement; each resample yields a
//! micro-WER for both systems and their difference. All resample index sets
//! are pre-generated from the seed, so the result is bit-identical across
//! runs and worker counts.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::ScoredPair;

/// Outcome of [`paired_bootstrap`]. Differences are `A - B` in percentage
/// points, so a negative `mean_diff` means system A has the lower error rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub mean_diff: f64,
    /// 2.5th percentile of the resampled differences.
    pub ci_low: f64,
    /// 97.5th percentile of the resampled differences.
    pub ci_high: f64,
    /// Half the width of the 95% interval on the difference.
    pub half_width: f64,
    /// Two-sided sign-flip p-value: `min(1, 2 * min(P(d <= 0), P(d >= 0)))`.
    pub p_value: f64,
    pub n_resamples: usize,
    pub seed: u64,
    /// Bootstrap mean and CI half-width of system A's WER.
    pub mean_a: f64,
    pub half_width_a: f64,
    /// Bootstrap mean and CI half-width of system B's WER.
    pub mean_b: f64,
    pub half_width_b: f64,
}

impl BootstrapResult {
    /// Reporting form for one system, e.g. `"37.93 ± 1.32"`.
    pub fn render_a(&self) -> String {
        format_ci(self.mean_a, self.half_width_a)
    }

    pub fn render_b(&self) -> String {
        format_ci(self.mean_b, self.half_width_b)
    }
}

/// Renders `mean ± half-width` with two decimals.
pub fn format_ci(mean: f64, half_width: f64) -> String {
    format!("{mean:.2} ± {half_width:.2}")
}

/// Linear-interpolation percentile of ascending-sorted values, `q` in [0, 100].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

fn summarize(samples: &[f64]) -> (f64, f64, f64, f64) {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let lo = percentile(&sorted, 2.5);
    let hi = percentile(&sorted, 97.5);
    (mean, lo, hi, (hi - lo) / 2.0)
}

/// Runs the paired bootstrap over `n_resamples` resamples drawn from `seed`.
///
/// `a` and `b` must cover exactly the same utterance ids (unique within each
/// side), every reference must be non-empty, and `n_resamples` must be at
/// least 2. Pairs are processed in id order, so input order never matters.
pub fn paired_bootstrap(a: &[ScoredPair], b: &[ScoredPair], n_resamples: usize, seed: u64) -> Result<BootstrapResult> {
    if n_resamples < 2 {
        return Err(Error::TooFewResamples(n_resamples));
    }
    let index_a: BTreeMap<&str, &ScoredPair> =
        a.iter().map(|p| (p.utterance_id.as_str(), p)).collect();
    let index_b: BTreeMap<&str, &ScoredPair> =
        b.iter().map(|p| (p.utterance_id.as_str(), p)).collect();
    let only_in_a: Vec<String> = index_a
        .keys()
        .filter(|id| !index_b.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    let only_in_b: Vec<String> = index_b
        .keys()
        .filter(|id| !index_a.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    if !only_in_a.is_empty() || !only_in_b.is_empty() {
        return Err(Error::PairIdMismatch { only_in_a, only_in_b });
    }
    if index_a.is_empty() {
        return Err(Error::NoPairs);
    }

    // Canonical (id-sorted) order, independent of input order.
    let mut units: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(index_a.len());
    for (id, pa) in &index_a {
        let pb = index_b[id];
        if pa.ref_len == 0 || pb.ref_len == 0 {
            return Err(Error::EmptyReferenceInBootstrap(id.to_string()));
        }
        units.push((pa.errors(), pa.ref_len, pb.errors(), pb.ref_len));
    }

    let m = units.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: Vec<usize> = (0..n_resamples * m).map(|_| rng.random_range(0..m)).collect();

    let mut wer_a = Vec::with_capacity(n_resamples);
    let mut wer_b = Vec::with_capacity(n_resamples);
    let mut diffs = Vec::with_capacity(n_resamples);
    for r in 0..n_resamples {
        let (mut ea, mut ra, mut eb, mut rb) = (0usize, 0usize, 0usize, 0usize);
        for &i in &indices[r * m..(r + 1) * m] {
            let (uea, ura, ueb, urb) = units[i];
            ea += uea;
            ra += ura;
            eb += ueb;
            rb += urb;
        }
        let wa = 100.0 * ea as f64 / ra as f64;
        let wb = 100.0 * eb as f64 / rb as f64;
        wer_a.push(wa);
        wer_b.push(wb);
        diffs.push(wa - wb);
    }

    let (mean_diff, ci_low, ci_high, half_width) = summarize(&diffs);
    let (mean_a, _, _, half_width_a) = summarize(&wer_a);
    let (mean_b, _, _, half_width_b) = summarize(&wer_b);

    let n_le = diffs.iter().filter(|d| **d <= 0.0).count();
    let n_ge = diffs.iter().filter(|d| **d >= 0.0).count();
    let p_value = (2.0 * n_le.min(n_ge) as f64 / n_resamples as f64).min(1.0);

    Ok(BootstrapResult {
        mean_diff,
        ci_low,
        ci_high,
        half_width,
        p_value,
        n_resamples,
        seed,
        mean_a,
        half_width_a,
        mean_b,
        half_width_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::score_words;

    fn pair(id: &str, reference: &str, hypothesis: &str) -> ScoredPair {
        score_words(id, reference, hypothesis)
    }

    fn system(texts: &[(&str, &str, &str)]) -> Vec<ScoredPair> {
        texts.iter().map(|(id, r, h)| pair(id, r, h)).collect()
    }

    #[test]
    fn identical_systems_are_degenerate() {
        let a = system(&[("u1", "a b c", "a b x"), ("u2", "d e", "d e")]);
        let result = paired_bootstrap(&a, &a, 1000, 42).unwrap();
        assert_eq!(result.mean_diff, 0.0);
        assert_eq!(result.ci_low, 0.0);
        assert_eq!(result.ci_high, 0.0);
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let a = system(&[("u1", "a b c", "a x c"), ("u2", "d e f g", "d e f"), ("u3", "h i", "h i")]);
        let b = system(&[("u1", "a b c", "a b c"), ("u2", "d e f g", "d e f g"), ("u3", "h i", "x i")]);
        let r1 = paired_bootstrap(&a, &b, 500, 7).unwrap();
        let r2 = paired_bootstrap(&a, &b, 500, 7).unwrap();
        assert_eq!(r1.mean_diff.to_bits(), r2.mean_diff.to_bits());
        assert_eq!(r1.ci_low.to_bits(), r2.ci_low.to_bits());
        assert_eq!(r1.ci_high.to_bits(), r2.ci_high.to_bits());
        assert_eq!(r1.p_value.to_bits(), r2.p_value.to_bits());

        // Input order must not matter: the pairing is id-sorted.
        let mut a_rev = a.clone();
        a_rev.reverse();
        let r3 = paired_bootstrap(&a_rev, &b, 500, 7).unwrap();
        assert_eq!(r1, r3);
    }

    #[test]
    fn strictly_better_system_is_significant() {
        // A is error-free, B wrong on every one of 10 utterances.
        let texts: Vec<(String, String, String)> = (0..10)
            .map(|i| (format!("u{i}"), "w x y z".to_string(), "w x y q".to_string()))
            .collect();
        let a: Vec<ScoredPair> = texts.iter().map(|(id, r, _)| pair(id, r, r)).collect();
        let b: Vec<ScoredPair> = texts.iter().map(|(id, r, h)| pair(id, r, h)).collect();
        let result = paired_bootstrap(&a, &b, 1000, 3).unwrap();
        assert!(result.p_value < 0.01, "p = {}", result.p_value);
        assert!(result.mean_diff < 0.0);
    }

    /// Exact enumeration on a 3-utterance instance: every one of the 3^3
    /// possible resample index triples gives WER(A) < WER(B) when A beats B
    /// on each utterance, so any seed must produce p = 0.
    #[test]
    fn enumeration_backs_strict_separation() {
        let refs = ["a b", "c d e", "f g"];
        let a: Vec<ScoredPair> = refs
            .iter()
            .enumerate()
            .map(|(i, r)| pair(&format!("u{i}"), r, r))
            .collect();
        let hyps = ["a x", "c d q", "f q"];
        let b: Vec<ScoredPair> = refs
            .iter()
            .zip(&hyps)
            .enumerate()
            .map(|(i, (r, h))| pair(&format!("u{i}"), r, h))
            .collect();

        let unit = |pairs: &[ScoredPair], i: usize| (pairs[i].errors(), pairs[i].ref_len);
        for i0 in 0..3 {
            for i1 in 0..3 {
                for i2 in 0..3 {
                    let sum = |pairs: &[ScoredPair]| {
                        let mut e = 0;
                        let mut r = 0;
                        for &i in &[i0, i1, i2] {
                            let (ue, ur) = unit(pairs, i);
                            e += ue;
                            r += ur;
                        }
                        100.0 * e as f64 / r as f64
                    };
                    assert!(sum(&a) < sum(&b));
                }
            }
        }

        for seed in [0u64, 1, 99] {
            let result = paired_bootstrap(&a, &b, 200, seed).unwrap();
            assert_eq!(result.p_value, 0.0);
        }
    }

    #[test]
    fn render_matches_reporting_style() {
        assert_eq!(format_ci(37.93, 1.32), "37.93 ± 1.32");
        assert_eq!(format_ci(36.77, 1.21), "36.77 ± 1.21");
    }

    #[test]
    fn errors() {
        let a = system(&[("u1", "a", "a")]);
        let b = system(&[("u2", "a", "a")]);
        assert!(matches!(
            paired_bootstrap(&a, &b, 100, 0),
            Err(Error::PairIdMismatch { .. })
        ));
        assert!(matches!(
            paired_bootstrap(&a, &a, 1, 0),
            Err(Error::TooFewResamples(1))
        ));
        let empty_ref = system(&[("u1", "", "x")]);
        assert!(matches!(
            paired_bootstrap(&empty_ref, &empty_ref, 10, 0),
            Err(Error::EmptyReferenceInBootstrap(_))
        ));
    }
}
