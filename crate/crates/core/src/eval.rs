//! End-to-end evaluation orchestration: normalization, scoring, aggregation,
//! system comparison, and the duration report.
//!
//! `evaluate_run` and `compare_runs` are pure functions of their inputs;
//! re-running them yields byte-identical JSON.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::{Gender, Lang, Split};
use crate::manifest::{HypothesisRecord, Utterance};
use crate::metrics::{
    self, checkpoint_score, gender_strata, paired_bootstrap, score_chars, score_words,
    BootstrapResult, ScoredPair,
};
use crate::normalize::{apply_pipeline, NormalizationConfig};

/// Options for [`evaluate_run`].
#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Restrict evaluation to one split; `None` evaluates everything.
    pub split: Option<Split>,
    /// Worker threads for per-utterance scoring; `None` uses the default pool.
    pub workers: Option<usize>,
    /// Count internal spaces as CER tokens.
    pub cer_count_spaces: bool,
    /// Compute per-language gender strata.
    pub gender: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            split: None,
            workers: None,
            cer_count_spaces: true,
            gender: true,
        }
    }
}

/// Per-language evaluation row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LangReport {
    pub wer: f64,
    pub cer: f64,
    pub lid_acc: Option<f64>,
    pub male_wer: Option<f64>,
    pub female_wer: Option<f64>,
    /// Male minus female WER; positive means higher error for male speakers.
    pub delta: Option<f64>,
    pub n_utts: usize,
    pub ref_words: usize,
    pub word_errors: usize,
    pub ref_chars: usize,
    pub char_errors: usize,
    pub n_male: usize,
    pub n_female: usize,
    pub n_unknown: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gender_note: Option<String>,
}

/// Corpus-wide aggregation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    /// Micro average: error counts pooled over all utterances.
    pub wer: f64,
    pub cer: f64,
    /// Macro average: unweighted mean of the per-language rates.
    pub macro_wer: f64,
    pub macro_cer: f64,
    /// `0.5 * wer + 0.5 * cer`, same (percent) unit as its inputs.
    pub checkpoint: f64,
    pub lid_acc: Option<f64>,
    pub n_utts: usize,
    pub ref_words: usize,
    pub word_errors: usize,
    pub ref_chars: usize,
    pub char_errors: usize,
}

/// Full evaluation report: per-language rows plus the aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub languages: BTreeMap<String, LangReport>,
    pub aggregate: AggregateReport,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per language plus an `ALL` aggregate row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "language,wer,cer,lid_acc,male_wer,female_wer,delta,n_utts,ref_words\n",
        );
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
        for (code, row) in &self.languages {
            out.push_str(&format!(
                "{},{:.2},{:.2},{},{},{},{},{},{}\n",
                code,
                row.wer,
                row.cer,
                opt(row.lid_acc),
                opt(row.male_wer),
                opt(row.female_wer),
                opt(row.delta),
                row.n_utts,
                row.ref_words
            ));
        }
        let agg = &self.aggregate;
        out.push_str(&format!(
            "ALL,{:.2},{:.2},{},,,,{},{}\n",
            agg.wer,
            agg.cer,
            opt(agg.lid_acc),
            agg.n_utts,
            agg.ref_words
        ));
        out
    }
}

/// One utterance scored at the word and character level.
#[derive(Debug, Clone)]
struct ScoredUtterance {
    lang: Lang,
    gender: Gender,
    words: ScoredPair,
    chars: ScoredPair,
    predicted_lang: Option<Lang>,
}

fn run_with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::ManifestRecord {
                    line: 0,
                    message: format!("failed to build worker pool: {e}"),
                })?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Selects the evaluation set and joins utterances with their hypotheses.
///
/// Every hypothesis id must resolve against the full manifest; every selected
/// utterance must have a hypothesis.
fn join<'a>(
    manifest: &'a [Utterance],
    hypotheses: &'a [HypothesisRecord],
    split: Option<Split>,
) -> Result<Vec<(&'a Utterance, &'a HypothesisRecord)>> {
    let all_ids: HashMap<&str, ()> = manifest.iter().map(|u| (u.id.as_str(), ())).collect();
    let mut unmatched: Vec<String> = hypotheses
        .iter()
        .filter(|h| !all_ids.contains_key(h.id.as_str()))
        .map(|h| h.id.clone())
        .collect();
    if !unmatched.is_empty() {
        unmatched.sort();
        return Err(Error::UnmatchedHypotheses(unmatched));
    }

    let by_id: HashMap<&str, &HypothesisRecord> =
        hypotheses.iter().map(|h| (h.id.as_str(), h)).collect();
    let selected: Vec<&Utterance> = manifest
        .iter()
        .filter(|u| split.is_none_or(|s| u.split == s))
        .collect();
    if selected.is_empty() {
        return Err(Error::EmptyEvalSet(split.map(|s| s.to_string())));
    }
    let mut missing: Vec<String> = selected
        .iter()
        .filter(|u| !by_id.contains_key(u.id.as_str()))
        .map(|u| u.id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::MissingHypotheses(missing));
    }
    Ok(selected.into_iter().map(|u| (u, by_id[u.id.as_str()])).collect())
}

fn score_all(
    joined: &[(&Utterance, &HypothesisRecord)],
    config: &NormalizationConfig,
    cer_count_spaces: bool,
) -> Vec<ScoredUtterance> {
    joined
        .par_iter()
        .map(|(utt, hyp)| {
            let reference = apply_pipeline(&utt.text, utt.language, config);
            let hypothesis = apply_pipeline(&hyp.text, utt.language, config);
            ScoredUtterance {
                lang: utt.language,
                gender: utt.gender,
                words: score_words(&utt.id, &reference, &hypothesis),
                chars: score_chars(&utt.id, &reference, &hypothesis, cer_count_spaces),
                predicted_lang: hyp.predicted_lang,
            }
        })
        .collect()
}

/// Normalizes references and hypotheses per language, scores every utterance,
/// and assembles per-language plus aggregate WER/CER (micro and macro), LID
/// accuracy when predictions are present, and gender strata when requested.
pub fn evaluate_run(
    manifest: &[Utterance],
    hypotheses: &[HypothesisRecord],
    config: &NormalizationConfig,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let joined = join(manifest, hypotheses, options.split)?;
    let scored = run_with_workers(options.workers, || {
        score_all(&joined, config, options.cer_count_spaces)
    })?;

    let mut by_lang: BTreeMap<Lang, Vec<&ScoredUtterance>> = BTreeMap::new();
    for s in &scored {
        by_lang.entry(s.lang).or_default().push(s);
    }
    let any_lid = scored.iter().any(|s| s.predicted_lang.is_some());

    let mut languages = BTreeMap::new();
    for (lang, group) in &by_lang {
        let word_pairs: Vec<ScoredPair> = group.iter().map(|s| s.words.clone()).collect();
        let char_pairs: Vec<ScoredPair> = group.iter().map(|s| s.chars.clone()).collect();
        let wer = metrics::wer(&word_pairs)?;
        let cer = metrics::cer(&char_pairs)?;
        let lid_acc = if any_lid {
            let pairs: Vec<(Lang, Option<Lang>)> =
                group.iter().map(|s| (s.lang, s.predicted_lang)).collect();
            Some(metrics::lid_accuracy(&pairs)?)
        } else {
            None
        };

        let (male_wer, female_wer, delta, n_male, n_female, n_unknown, gender_note) = if options.gender {
            let items: Vec<(Lang, Gender, ScoredPair)> = group
                .iter()
                .map(|s| (s.lang, s.gender, s.words.clone()))
                .collect();
            let strata = gender_strata(&items);
            let b = &strata[lang];
            (
                b.male_wer,
                b.female_wer,
                b.delta,
                b.n_male,
                b.n_female,
                b.n_unknown,
                b.note.clone(),
            )
        } else {
            let n_male = group.iter().filter(|s| s.gender == Gender::Male).count();
            let n_female = group.iter().filter(|s| s.gender == Gender::Female).count();
            let n_unknown = group.len() - n_male - n_female;
            (None, None, None, n_male, n_female, n_unknown, None)
        };

        languages.insert(
            lang.code().to_string(),
            LangReport {
                wer,
                cer,
                lid_acc,
                male_wer,
                female_wer,
                delta,
                n_utts: group.len(),
                ref_words: word_pairs.iter().map(|p| p.ref_len).sum(),
                word_errors: word_pairs.iter().map(ScoredPair::errors).sum(),
                ref_chars: char_pairs.iter().map(|p| p.ref_len).sum(),
                char_errors: char_pairs.iter().map(ScoredPair::errors).sum(),
                n_male,
                n_female,
                n_unknown,
                gender_note,
            },
        );
    }

    let ref_words: usize = languages.values().map(|r| r.ref_words).sum();
    let word_errors: usize = languages.values().map(|r| r.word_errors).sum();
    let ref_chars: usize = languages.values().map(|r| r.ref_chars).sum();
    let char_errors: usize = languages.values().map(|r| r.char_errors).sum();
    if ref_words == 0 || ref_chars == 0 {
        return Err(Error::ZeroReferenceLength);
    }
    let wer = 100.0 * word_errors as f64 / ref_words as f64;
    let cer = 100.0 * char_errors as f64 / ref_chars as f64;
    let macro_wer = languages.values().map(|r| r.wer).sum::<f64>() / languages.len() as f64;
    let macro_cer = languages.values().map(|r| r.cer).sum::<f64>() / languages.len() as f64;
    let lid_acc = if any_lid {
        let pairs: Vec<(Lang, Option<Lang>)> =
            scored.iter().map(|s| (s.lang, s.predicted_lang)).collect();
        Some(metrics::lid_accuracy(&pairs)?)
    } else {
        None
    };

    Ok(EvalReport {
        aggregate: AggregateReport {
            wer,
            cer,
            macro_wer,
            macro_cer,
            checkpoint: checkpoint_score(wer, cer),
            lid_acc,
            n_utts: scored.len(),
            ref_words,
            word_errors,
            ref_chars,
            char_errors,
        },
        languages,
    })
}

/// Comparison of two systems on the same manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub languages: BTreeMap<String, BootstrapResult>,
    pub overall: BootstrapResult,
    /// Table-style lines, one per language plus `ALL`:
    /// `AMH  A: 37.93 ± 1.32  B: 38.04 ± 1.23  diff: -0.11  p=0.620`.
    pub summary: Vec<String>,
}

impl CompareReport {
    fn new(languages: BTreeMap<String, BootstrapResult>, overall: BootstrapResult) -> Self {
        let summary = languages
            .iter()
            .chain(std::iter::once((&"ALL".to_string(), &overall)))
            .map(|(code, r)| {
                format!(
                    "{code}  A: {}  B: {}  diff: {:+.2}  p={:.3}",
                    r.render_a(),
                    r.render_b(),
                    r.mean_diff,
                    r.p_value
                )
            })
            .collect();
        CompareReport {
            languages,
            overall,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "language,wer_a,half_width_a,wer_b,half_width_b,mean_diff,ci_low,ci_high,p_value\n",
        );
        let mut row = |label: &str, r: &BootstrapResult| {
            out.push_str(&format!(
                "{},{:.2},{:.2},{:.2},{:.2},{:.4},{:.4},{:.4},{:.4}\n",
                label, r.mean_a, r.half_width_a, r.mean_b, r.half_width_b, r.mean_diff, r.ci_low, r.ci_high, r.p_value
            ));
        };
        for (code, result) in &self.languages {
            row(code, result);
        }
        row("ALL", &self.overall);
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = self.summary.join("\n");
        out.push('\n');
        out
    }
}

/// Scores two hypothesis sets under the same normalization and runs the
/// paired bootstrap per language and overall.
pub fn compare_runs(
    manifest: &[Utterance],
    hyps_a: &[HypothesisRecord],
    hyps_b: &[HypothesisRecord],
    config: &NormalizationConfig,
    options: &EvalOptions,
    n_resamples: usize,
    seed: u64,
) -> Result<CompareReport> {
    let joined_a = join(manifest, hyps_a, options.split)?;
    let joined_b = join(manifest, hyps_b, options.split)?;
    let (scored_a, scored_b) = run_with_workers(options.workers, || {
        (
            score_all(&joined_a, config, options.cer_count_spaces),
            score_all(&joined_b, config, options.cer_count_spaces),
        )
    })?;

    let collect = |scored: &[ScoredUtterance], lang: Option<Lang>| -> Vec<ScoredPair> {
        scored
            .iter()
            .filter(|s| lang.is_none_or(|l| s.lang == l))
            .map(|s| s.words.clone())
            .collect()
    };

    let mut languages = BTreeMap::new();
    let present: Vec<Lang> = {
        let mut langs: Vec<Lang> = scored_a.iter().map(|s| s.lang).collect();
        langs.sort();
        langs.dedup();
        langs
    };
    for lang in present {
        let result = paired_bootstrap(
            &collect(&scored_a, Some(lang)),
            &collect(&scored_b, Some(lang)),
            n_resamples,
            seed,
        )?;
        languages.insert(lang.code().to_string(), result);
    }
    let overall = paired_bootstrap(&collect(&scored_a, None), &collect(&scored_b, None), n_resamples, seed)?;
    Ok(CompareReport::new(languages, overall))
}

/// Hours of audio by (language, split, gender), with an `All` row per split.
///
/// Cells are rounded to two decimals; the `All` row sums the rounded
/// per-gender cells so the table is internally consistent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationReport {
    pub splits: BTreeMap<Split, BTreeMap<String, BTreeMap<Lang, f64>>>,
}

/// Row labels within each split, in rendering order.
pub const GENDER_ROWS: [&str; 4] = ["M", "F", "unknown", "All"];

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Builds the duration table from manifest records.
pub fn duration_report(manifest: &[Utterance]) -> DurationReport {
    let mut raw: BTreeMap<Split, BTreeMap<String, BTreeMap<Lang, f64>>> = BTreeMap::new();
    for split in [Split::Train, Split::Validation, Split::Test] {
        let mut rows = BTreeMap::new();
        for label in GENDER_ROWS {
            rows.insert(label.to_string(), Lang::ALL.iter().map(|&l| (l, 0.0)).collect());
        }
        raw.insert(split, rows);
    }
    for utt in manifest {
        let label = utt.gender.to_string();
        let rows = raw.get_mut(&utt.split).expect("all splits present");
        *rows.get_mut(&label).unwrap().get_mut(&utt.language).unwrap() += utt.duration_s / 3600.0;
    }
    for rows in raw.values_mut() {
        for lang in Lang::ALL {
            let mut total = 0.0;
            for label in ["M", "F", "unknown"] {
                let cell = rows.get_mut(label).unwrap().get_mut(&lang).unwrap();
                *cell = round2(*cell);
                total += *cell;
            }
            *rows.get_mut("All").unwrap().get_mut(&lang).unwrap() = round2(total);
        }
    }
    DurationReport { splits: raw }
}

impl DurationReport {
    pub fn hours(&self, split: Split, gender_row: &str, lang: Lang) -> f64 {
        self.splits[&split][gender_row][&lang]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("split,gender");
        for lang in Lang::ALL {
            out.push_str(&format!(",{}", lang.code()));
        }
        out.push('\n');
        for split in [Split::Train, Split::Validation, Split::Test] {
            for label in GENDER_ROWS {
                out.push_str(&format!("{split},{label}"));
                for lang in Lang::ALL {
                    out.push_str(&format!(",{:.2}", self.hours(split, label, lang)));
                }
                out.push('\n');
            }
        }
        out
    }
}
