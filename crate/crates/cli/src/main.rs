//! Command-line surface for the evaluation toolkit.
//!
//! Exit codes: 0 success, 1 validation error (bad arguments or malformed
//! data), 2 I/O error. Relative input paths are also tried under the
//! `ETHIO_EVAL_DATA` root when they do not exist in the working directory.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use ethio_eval::ctc::{ctc_log_likelihood_flat, greedy_decode, LogitMatrix};
use ethio_eval::eval::{compare_runs, duration_report, evaluate_run, EvalOptions};
use ethio_eval::lexstats::{ttr_at, vocab_growth};
use ethio_eval::manifest::{load_hypotheses, load_manifest, manifest_from_csv, to_jsonl, Utterance};
use ethio_eval::normalize::{apply_pipeline, parse_digraphs, parse_homophone_map, NormProfile, NormalizationConfig};
use ethio_eval::vocab::{build_vocab, GraphemeVocab, VocabConfig, UNK_SYMBOL};
use ethio_eval::{Lang, Split};

#[derive(Parser)]
#[command(name = "ethio-eval", version, about = "Evaluation toolkit for joint multilingual ASR + language identification over five Ethiopian languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Normalization selection shared by the scoring subcommands.
#[derive(Args)]
struct NormArgs {
    /// Profile: none, eval, vowel, geminate, both, full
    #[arg(long, default_value = "eval")]
    norm: NormProfile,
    /// Custom homophone table (UTF-8 TSV, `source<TAB>target` per line)
    #[arg(long)]
    homophones: Option<PathBuf>,
    /// Custom digraph list (one per line)
    #[arg(long)]
    digraphs: Option<PathBuf>,
}

impl NormArgs {
    fn to_config(&self) -> Result<NormalizationConfig> {
        let mut config = self.norm.to_config();
        if let Some(path) = &self.homophones {
            config.homophone_map = parse_homophone_map(&read_input(path)?)?;
        }
        if let Some(path) = &self.digraphs {
            config.digraphs = parse_digraphs(&read_input(path)?)?;
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect a grapheme vocabulary
    #[command(subcommand)]
    Vocab(VocabCommand),
    /// Encode text as a language token plus grapheme ids
    Encode(EncodeArgs),
    /// Greedy-decode a logit matrix into (language, text)
    DecodeLogits(DecodeLogitsArgs),
    /// CTC log-likelihood of a target under a logit matrix
    CtcLoss(CtcLossArgs),
    /// Run the normalization pipeline over text
    Normalize(NormalizeArgs),
    /// Score a hypothesis file against a manifest
    Evaluate(EvaluateArgs),
    /// Compare two hypothesis files with a paired bootstrap
    Compare(CompareArgs),
    /// Per-language WER by speaker gender
    GenderReport(GenderReportArgs),
    /// Hours of audio by language, split and gender
    DurationReport(DurationReportArgs),
    /// Corpus lexical statistics
    #[command(subcommand)]
    Lexstats(LexstatsCommand),
    /// Convert a CSV manifest to JSON Lines
    ConvertManifest(ConvertManifestArgs),
}

#[derive(Subcommand)]
enum VocabCommand {
    /// Build a vocabulary and write it as one symbol per line
    Build(VocabBuildArgs),
    /// Summarize a vocabulary file
    Inspect(VocabInspectArgs),
}

#[derive(Args)]
struct VocabBuildArgs {
    /// Output vocabulary file
    #[arg(long)]
    output: PathBuf,
    /// Skip the 326 core Ge'ez graphemes
    #[arg(long)]
    no_geez_core: bool,
    /// Skip the 29 Ethiopic punctuation marks and numerals
    #[arg(long)]
    no_ethiopic_punct: bool,
    /// Skip the 26 Latin letters
    #[arg(long)]
    no_latin_letters: bool,
    /// Skip the 25 Latin punctuation marks and numerals
    #[arg(long)]
    no_latin_punct: bool,
    /// Manifest whose reference texts extend the vocabulary
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Extra symbols appended after the blocks (repeatable)
    #[arg(long = "extra")]
    extra_symbols: Vec<String>,
    /// Append an <unk> symbol for non-strict encoding
    #[arg(long)]
    with_unk: bool,
    /// Mark the vocabulary as strict by default
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VocabInspectArgs {
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    lang: Lang,
    /// Text to encode; use --input to read lines from a file instead
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    text: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Fail on unknown graphemes instead of mapping to <unk>
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct DecodeLogitsArgs {
    /// Logit matrix file (CTCL binary or `T V` text)
    #[arg(long)]
    logits: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CtcLossArgs {
    #[arg(long)]
    logits: PathBuf,
    #[arg(long, required_unless_present = "target_ids")]
    vocab: Option<PathBuf>,
    #[arg(long, requires = "text")]
    lang: Option<Lang>,
    #[arg(long, requires = "lang", conflicts_with = "target_ids")]
    text: Option<String>,
    /// Raw space-separated target ids (language token first)
    #[arg(long)]
    target_ids: Option<String>,
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    lang: Lang,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    text: Option<String>,
    /// Normalize each line of this file
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long)]
    split: Option<Split>,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long)]
    workers: Option<usize>,
    /// Exclude internal spaces from character scoring
    #[arg(long)]
    cer_no_spaces: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long)]
    hyp_b: PathBuf,
    #[arg(long)]
    split: Option<Split>,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long, default_value_t = 1000)]
    bootstrap_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenderReportArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long)]
    split: Option<Split>,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct DurationReportArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum LexstatsCommand {
    /// Vocabulary growth curve over a language's reference text
    Growth(GrowthArgs),
    /// Type-token ratio at a fixed token budget
    Ttr(TtrArgs),
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    lang: Lang,
    #[arg(long)]
    split: Option<Split>,
    #[command(flatten)]
    norm: NormArgs,
    /// Sample the type count after every N tokens
    #[arg(long, default_value_t = 1000)]
    step: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct TtrArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    lang: Lang,
    #[arg(long)]
    split: Option<Split>,
    #[command(flatten)]
    norm: NormArgs,
    /// Token budget
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ConvertManifestArgs {
    /// CSV file with id,language,split,gender,duration_s,text[,audio_path]
    #[arg(long)]
    input: PathBuf,
    /// JSONL output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Quotes a free-text CSV field when it contains a delimiter or quote.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Resolves a path, falling back to `$ETHIO_EVAL_DATA/<path>` for relative
/// paths that do not exist in the working directory.
fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() || path.exists() {
        return path.to_path_buf();
    }
    if let Ok(root) = std::env::var("ETHIO_EVAL_DATA") {
        let candidate = Path::new(&root).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn read_input(path: &Path) -> Result<String> {
    let path = resolve(path);
    let mut content = String::new();
    fs::File::open(&path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_string(&mut content)?;
    Ok(content)
}

fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn load_corpus(path: &Path) -> Result<Vec<Utterance>> {
    Ok(load_manifest(resolve(path))?)
}

fn token_stream(manifest: &[Utterance], lang: Lang, split: Option<Split>, config: &NormalizationConfig) -> Vec<String> {
    manifest
        .iter()
        .filter(|u| u.language == lang && split.is_none_or(|s| u.split == s))
        .flat_map(|u| {
            apply_pipeline(&u.text, lang, config)
                .split_whitespace()
                .map(String::from)
                .collect::<Vec<_>>()
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Vocab(VocabCommand::Build(args)) => {
            let mut extra = args.extra_symbols.clone();
            if args.with_unk && !extra.iter().any(|s| s == UNK_SYMBOL) {
                extra.push(UNK_SYMBOL.to_string());
            }
            let config = VocabConfig {
                include_geez_core: !args.no_geez_core,
                include_ethiopic_punct_numerals: !args.no_ethiopic_punct,
                include_latin_letters: !args.no_latin_letters,
                include_latin_punct_numerals: !args.no_latin_punct,
                strict_unknowns: args.strict,
                extra_symbols: extra,
            };
            let corpus: Option<Vec<(Lang, String)>> = match &args.corpus {
                Some(path) => Some(
                    load_corpus(path)?
                        .into_iter()
                        .map(|u| (u.language, u.text))
                        .collect(),
                ),
                None => None,
            };
            let vocab = build_vocab(&config, corpus.as_deref())?;
            vocab.save(&args.output)?;
            let summary = serde_json::json!({
                "path": args.output.display().to_string(),
                "size": vocab.size(),
                "blank_id": vocab.blank_id(),
                "unk_id": vocab.unk_id(),
            });
            match args.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
                Format::Csv => println!("size,blank_id\n{},{}", vocab.size(), vocab.blank_id()),
            }
        }
        Command::Vocab(VocabCommand::Inspect(args)) => {
            let vocab = GraphemeVocab::load(resolve(&args.vocab))?;
            let lid: serde_json::Map<String, serde_json::Value> = Lang::ALL
                .iter()
                .filter_map(|&l| vocab.lid_id(l).map(|id| (l.code().to_string(), id.into())))
                .collect();
            let n_single = vocab.symbols().filter(|s| s.chars().count() == 1).count();
            let summary = serde_json::json!({
                "size": vocab.size(),
                "blank_id": vocab.blank_id(),
                "lid_ids": lid,
                "unk_id": vocab.unk_id(),
                "single_scalar_symbols": n_single,
            });
            match args.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
                Format::Csv => println!("size,blank_id,single_scalar_symbols\n{},{},{}", vocab.size(), vocab.blank_id(), n_single),
            }
        }
        Command::Encode(args) => {
            let vocab = GraphemeVocab::load(resolve(&args.vocab))?;
            let strict = args.strict || vocab.strict_unknowns();
            let texts: Vec<String> = match (&args.text, &args.input) {
                (Some(t), None) => vec![t.clone()],
                (None, Some(path)) => read_input(path)?.lines().map(String::from).collect(),
                _ => unreachable!("clap enforces exactly one of --text/--input"),
            };
            let mut rows = Vec::new();
            for text in &texts {
                let target = vocab.encode_target(text, args.lang, strict)?;
                rows.push(serde_json::json!({
                    "lang_id": target.lang_id,
                    "grapheme_ids": target.grapheme_ids,
                }));
            }
            match args.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
                Format::Csv => {
                    println!("lang_id,grapheme_ids");
                    for row in &rows {
                        let ids: Vec<String> = row["grapheme_ids"]
                            .as_array()
                            .unwrap()
                            .iter()
                            .map(|v| v.to_string())
                            .collect();
                        println!("{},{}", row["lang_id"], ids.join(" "));
                    }
                }
            }
        }
        Command::DecodeLogits(args) => {
            let vocab = GraphemeVocab::load(resolve(&args.vocab))?;
            let logits = LogitMatrix::load(resolve(&args.logits))?;
            let decoded = greedy_decode(&logits, &vocab)?;
            match args.format {
                Format::Json => {
                    let out = serde_json::json!({
                        "lang": decoded.lang.map(|l| l.code()),
                        "text": decoded.text,
                        "misplaced_lid": decoded.misplaced_lid,
                        "raw_ids": decoded.raw_ids,
                    });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                Format::Csv => println!(
                    "lang,text,misplaced_lid\n{},{},{}",
                    decoded.lang.map(|l| l.code()).unwrap_or(""),
                    csv_field(&decoded.text),
                    decoded.misplaced_lid
                ),
            }
        }
        Command::CtcLoss(args) => {
            let logits = LogitMatrix::load(resolve(&args.logits))?;
            let labels: Vec<usize> = match (&args.target_ids, &args.text, args.lang) {
                (Some(ids), None, _) => ids
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| anyhow!("bad target id {t:?}: {e}")))
                    .collect::<Result<_>>()?,
                (None, Some(text), Some(lang)) => {
                    let vocab_path = args.vocab.as_ref().expect("clap enforces --vocab without --target-ids");
                    let vocab = GraphemeVocab::load(resolve(vocab_path))?;
                    let strict = args.strict || vocab.strict_unknowns();
                    vocab.encode_target(text, lang, strict)?.flat()
                }
                _ => bail!("provide either --target-ids or --vocab with --lang and --text"),
            };
            let log_likelihood = ctc_log_likelihood_flat(&logits, &labels, 0)?;
            match args.format {
                Format::Json => {
                    let out = serde_json::json!({
                        "log_likelihood": log_likelihood,
                        "frames": logits.frames(),
                        "target_len": labels.len(),
                    });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                Format::Csv => println!("log_likelihood,frames,target_len\n{},{},{}", log_likelihood, logits.frames(), labels.len()),
            }
        }
        Command::Normalize(args) => {
            let config = args.norm.to_config()?;
            let lines: Vec<String> = match (&args.text, &args.input) {
                (Some(t), None) => vec![t.clone()],
                (None, Some(path)) => read_input(path)?.lines().map(String::from).collect(),
                _ => unreachable!("clap enforces exactly one of --text/--input"),
            };
            let normalized: Vec<String> = lines
                .iter()
                .map(|l| apply_pipeline(l, args.lang, &config))
                .collect();
            match args.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "normalized": normalized }))?),
                Format::Csv => {
                    println!("normalized");
                    for line in &normalized {
                        println!("{}", csv_field(line));
                    }
                }
            }
        }
        Command::Evaluate(args) => {
            let manifest = load_corpus(&args.manifest)?;
            let hyps = load_hypotheses(resolve(&args.hyp))?;
            let options = EvalOptions {
                split: args.split,
                workers: args.workers,
                cer_count_spaces: !args.cer_no_spaces,
                gender: true,
            };
            let report = evaluate_run(&manifest, &hyps, &args.norm.to_config()?, &options)?;
            let content = match args.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report.to_csv(),
            };
            emit(args.output.as_deref(), &content)?;
        }
        Command::Compare(args) => {
            let manifest = load_corpus(&args.manifest)?;
            let hyps_a = load_hypotheses(resolve(&args.hyp))?;
            let hyps_b = load_hypotheses(resolve(&args.hyp_b))?;
            let options = EvalOptions {
                split: args.split,
                workers: args.workers,
                ..EvalOptions::default()
            };
            let report = compare_runs(
                &manifest,
                &hyps_a,
                &hyps_b,
                &args.norm.to_config()?,
                &options,
                args.bootstrap_n,
                args.seed,
            )?;
            let content = match args.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report.to_csv(),
            };
            emit(args.output.as_deref(), &content)?;
            if args.output.is_some() {
                eprint!("{}", report.render_text());
            }
        }
        Command::GenderReport(args) => {
            let manifest = load_corpus(&args.manifest)?;
            let hyps = load_hypotheses(resolve(&args.hyp))?;
            let options = EvalOptions {
                split: args.split,
                workers: args.workers,
                ..EvalOptions::default()
            };
            let report = evaluate_run(&manifest, &hyps, &args.norm.to_config()?, &options)?;
            match args.format {
                Format::Json => {
                    let rows: serde_json::Map<String, serde_json::Value> = report
                        .languages
                        .iter()
                        .map(|(code, row)| {
                            (
                                code.clone(),
                                serde_json::json!({
                                    "male_wer": row.male_wer,
                                    "female_wer": row.female_wer,
                                    "delta": row.delta,
                                    "n_male": row.n_male,
                                    "n_female": row.n_female,
                                    "n_unknown": row.n_unknown,
                                    "note": row.gender_note,
                                }),
                            )
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
                Format::Csv => {
                    println!("language,male_wer,female_wer,delta,n_male,n_female,n_unknown");
                    let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
                    for (code, row) in &report.languages {
                        println!(
                            "{},{},{},{},{},{},{}",
                            code,
                            opt(row.male_wer),
                            opt(row.female_wer),
                            opt(row.delta),
                            row.n_male,
                            row.n_female,
                            row.n_unknown
                        );
                    }
                }
            }
        }
        Command::DurationReport(args) => {
            let manifest = load_corpus(&args.manifest)?;
            let report = duration_report(&manifest);
            match args.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => print!("{}", report.to_csv()),
            }
        }
        Command::Lexstats(LexstatsCommand::Growth(args)) => {
            let manifest = load_corpus(&args.manifest)?;
            let tokens = token_stream(&manifest, args.lang, args.split, &args.norm.to_config()?);
            let curve = vocab_growth(tokens, args.step)?;
            match args.format {
                Format::Csv => print!("{}", curve.to_csv()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&curve)?),
            }
        }
        Command::Lexstats(LexstatsCommand::Ttr(args)) => {
            let manifest = load_corpus(&args.manifest)?;
            let tokens = token_stream(&manifest, args.lang, args.split, &args.norm.to_config()?);
            let total = tokens.len();
            let ttr = ttr_at(tokens.clone(), args.n)?;
            let types: std::collections::HashSet<&String> = tokens[..args.n].iter().collect();
            match args.format {
                Format::Json => {
                    let out = serde_json::json!({
                        "tokens": args.n,
                        "types": types.len(),
                        "ttr": ttr,
                        "stream_tokens": total,
                    });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                Format::Csv => println!("tokens,types,ttr\n{},{},{}", args.n, types.len(), ttr),
            }
        }
        Command::ConvertManifest(args) => {
            let content = read_input(&args.input)?;
            let utts = manifest_from_csv(content.as_bytes())?;
            emit(args.output.as_deref(), &to_jsonl(&utts))?;
        }
    }
    Ok(())
}

/// 2 for I/O failures, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
        if let Some(ethio_eval::Error::Io(_)) = cause.downcast_ref::<ethio_eval::Error>() {
            return 2;
        }
    }
    1
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
