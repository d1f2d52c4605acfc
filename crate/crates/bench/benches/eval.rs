use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use ethio_eval::ctc::{ctc_log_likelihood_flat, greedy_decode};
use ethio_eval::eval::{evaluate_run, EvalOptions};
use ethio_eval::metrics::{paired_bootstrap, score_words};
use ethio_eval::normalize::{apply_pipeline, NormalizationConfig};
use ethio_eval::vocab::{build_vocab, VocabConfig};
use ethio_eval::Lang;

use ethio_eval_bench::{random_logits, synthetic_corpus};

fn bench_ctc(c: &mut Criterion) {
    let mut group = c.benchmark_group("ctc");
    for &(frames, target_len) in &[(100usize, 20usize), (200, 50)] {
        let classes = 412;
        let logits = random_logits(frames, classes, 7);
        let labels: Vec<usize> = (0..target_len).map(|i| 6 + (i * 13) % (classes - 6)).collect();
        group.bench_function(BenchmarkId::new("forward", format!("T{frames}_N{target_len}")), |b| {
            b.iter(|| ctc_log_likelihood_flat(black_box(&logits), black_box(&labels), 0).unwrap())
        });
    }

    let vocab = build_vocab(&VocabConfig::default(), None).unwrap();
    let logits = random_logits(200, vocab.size(), 11);
    group.bench_function("greedy_decode/T200", |b| {
        b.iter(|| greedy_decode(black_box(&logits), black_box(&vocab)).unwrap())
    });
    group.finish();
}

fn bench_normalize(c: &mut Criterion) {
    let line = "Namooti hundinuu birmaduu ta'anii, mirgaa fi ulfinaanis wal-qixxee ta'anii dhalatan.";
    let config = NormalizationConfig::full();
    let mut group = c.benchmark_group("normalize");
    group.throughput(Throughput::Bytes(line.len() as u64));
    group.bench_function("pipeline_full/latin", |b| {
        b.iter(|| apply_pipeline(black_box(line), Lang::Orm, &config))
    });
    let geez = "የሰው ልጆች ሁሉ ነጻ፥ በክብርም በመብትም እኩል ሆነው ተወልደዋል። ፀሐይ ወጣች።";
    group.throughput(Throughput::Bytes(geez.len() as u64));
    group.bench_function("pipeline_eval/geez", |b| {
        let eval = NormalizationConfig::eval();
        b.iter(|| apply_pipeline(black_box(geez), Lang::Amh, &eval))
    });
    group.finish();
}

fn bench_scoring(c: &mut Criterion) {
    let (manifest, hyps) = synthetic_corpus(500, 3);
    let mut group = c.benchmark_group("scoring");
    group.bench_function("evaluate_run/500utts", |b| {
        let config = NormalizationConfig::eval();
        let options = EvalOptions::default();
        b.iter(|| evaluate_run(black_box(&manifest), black_box(&hyps), &config, &options).unwrap())
    });

    let pairs_a: Vec<_> = manifest
        .iter()
        .map(|u| score_words(&u.id, &u.text, &u.text))
        .collect();
    let pairs_b: Vec<_> = manifest
        .iter()
        .zip(&hyps)
        .map(|(u, h)| score_words(&u.id, &u.text, &h.text))
        .collect();
    group.bench_function("paired_bootstrap/n1000", |b| {
        b.iter(|| paired_bootstrap(black_box(&pairs_a), black_box(&pairs_b), 1000, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_ctc, bench_normalize, bench_scoring);
criterion_main!(benches);
