//! Evaluation core for joint multilingual ASR + language identification over
//! five Ethiopian languages (Amharic, Tigrinya, Oromo, Sidaama, Wolaytta).
//!
//! The crate covers the model-free side of such a system end to end:
//!
//! * [`vocab`]: dual-script grapheme vocabulary (Ge'ez + Latin) with a CTC
//!   blank and per-language tokens, and text/id conversion.
//! * [`ctc`]: exact CTC log-likelihood in log space, a brute-force
//!   enumeration oracle, path collapse, and greedy decoding with joint
//!   language-token extraction.
//! * [`normalize`]: script-aware normalization: punctuation removal, Ge'ez
//!   homophone folding, and analytical vowel-length/gemination collapse.
//! * [`metrics`]: WER/CER from deterministic Levenshtein alignments, LID
//!   accuracy, checkpoint scoring, gender strata, and a seeded paired
//!   bootstrap test.
//! * [`lexstats`]: vocabulary-growth curves and type-token ratio.
//! * [`manifest`] / [`eval`]: JSONL corpus ingestion and end-to-end
//!   evaluation orchestration with deterministic JSON/CSV reports.
//!
//! Everything operates on immutable inputs and is safe to run in parallel;
//! seeded operations are bit-identical across runs and worker counts.

pub mod ctc;
pub mod error;
pub mod eval;
pub mod lang;
pub mod lexstats;
pub mod manifest;
pub mod metrics;
pub mod normalize;
pub mod vocab;

pub use error::{Error, Result};
pub use lang::{Gender, Lang, Script, Split};

pub use ctc::{collapse_path, ctc_brute_force, ctc_log_likelihood, greedy_decode, GreedyDecode, LogitMatrix};
pub use eval::{compare_runs, duration_report, evaluate_run, CompareReport, DurationReport, EvalOptions, EvalReport};
pub use lexstats::{ttr_at, vocab_growth, GrowthCurve};
pub use manifest::{load_hypotheses, load_manifest, HypothesisRecord, Utterance};
pub use metrics::{
    checkpoint_score, edit_distance, lid_accuracy, paired_bootstrap, BootstrapResult, ScoredPair,
};
pub use normalize::{apply_pipeline, NormProfile, NormalizationConfig};
pub use vocab::{build_vocab, GraphemeVocab, TargetSequence, VocabConfig};
