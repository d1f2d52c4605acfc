//! Shared input builders for the benchmark suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ethio_eval::ctc::{log_sum_exp, LogitMatrix};
use ethio_eval::manifest::{HypothesisRecord, Utterance};
use ethio_eval::{Gender, Lang, Split};

/// Seeded random log-normalized logit matrix.
pub fn random_logits(frames: usize, classes: usize, seed: u64) -> LogitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..frames)
        .map(|_| {
            let raw: Vec<f64> = (0..classes).map(|_| rng.random_range(-5.0..5.0)).collect();
            let lse = log_sum_exp(&raw);
            raw.into_iter().map(|x| x - lse).collect()
        })
        .collect();
    LogitMatrix::from_rows(rows).expect("normalized rows")
}

/// Synthetic Latin-script corpus with one flawed hypothesis per utterance.
pub fn synthetic_corpus(n: usize, seed: u64) -> (Vec<Utterance>, Vec<HypothesisRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = [
        "hoomaa", "sammuu", "beetti", "guddaa", "namooti", "birmaduu", "kalaqamunni", "ta'anii",
        "wolaphinoho", "keettaa", "lagge", "dhuga",
    ];
    let langs = [Lang::Orm, Lang::Sid, Lang::Wal];
    let mut manifest = Vec::with_capacity(n);
    let mut hyps = Vec::with_capacity(n);
    for i in 0..n {
        let len = rng.random_range(4..12);
        let text: Vec<&str> = (0..len).map(|_| words[rng.random_range(0..words.len())]).collect();
        let mut hyp = text.clone();
        if rng.random_bool(0.6) {
            let at = rng.random_range(0..hyp.len());
            hyp[at] = "zzz";
        }
        manifest.push(Utterance {
            id: format!("u{i:05}"),
            language: langs[i % langs.len()],
            split: Split::Test,
            gender: if i % 2 == 0 { Gender::Female } else { Gender::Male },
            duration_s: len as f64,
            text: text.join(" "),
            audio_path: None,
        });
        hyps.push(HypothesisRecord {
            id: format!("u{i:05}"),
            text: hyp.join(" "),
            predicted_lang: Some(langs[i % langs.len()]),
        });
    }
    (manifest, hyps)
}
