use thiserror::Error;

/// Errors produced by any part of the evaluation library.
#[derive(Debug, Error)]
pub enum Error {
    // Vocabulary
    #[error("empty vocabulary configuration: all script blocks disabled and no corpus or extra symbols given")]
    EmptyVocabConfig,
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("symbols must not be empty or contain line breaks: {0:?}")]
    InvalidSymbol(String),
    #[error("unknown language code {0:?} (expected one of AMH, TIR, ORM, SID, WAL)")]
    UnknownLanguage(String),
    #[error("language token {0} missing from vocabulary")]
    MissingLidToken(&'static str),
    #[error("unknown grapheme {grapheme:?} at position {position} in strict mode")]
    UnknownGrapheme { grapheme: char, position: usize },
    #[error("unknown grapheme {grapheme:?} at position {position} and the vocabulary has no <unk> symbol")]
    NoUnkSymbol { grapheme: char, position: usize },
    #[error("text is empty after NFC normalization")]
    EmptyText,
    #[error("id {id} out of range for vocabulary of size {size}")]
    IdOutOfRange { id: usize, size: usize },
    #[error("blank id {0} is not decodable")]
    BlankInSequence(usize),
    #[error("language token {symbol} at non-initial position {position}")]
    MisplacedLidToken { symbol: String, position: usize },

    // Logits
    #[error("bad logit file magic (expected \"CTCL\")")]
    BadLogitMagic,
    #[error("logit matrix shape mismatch: expected {expected} values, got {got}")]
    LogitShape { expected: usize, got: usize },
    #[error("logit row {row} is not log-normalized: logsumexp = {logsumexp}")]
    UnnormalizedRow { row: usize, logsumexp: f64 },
    #[error("logit value at ({row}, {col}) is {value}; values must be finite or -inf")]
    BadLogitValue { row: usize, col: usize, value: f64 },
    #[error("logit matrix must have at least one frame and one class")]
    EmptyLogits,
    #[error("failed to parse logit text at line {line}: {message}")]
    LogitParse { line: usize, message: String },
    #[error("logit matrix has {logits} classes but vocabulary has {vocab} symbols")]
    VocabSizeMismatch { logits: usize, vocab: usize },

    // CTC
    #[error("target id {id} out of range for {classes} classes")]
    TargetIdOutOfRange { id: usize, classes: usize },
    #[error("target contains the blank id {0}")]
    BlankInTarget(usize),
    #[error("path enumeration too large: {paths:.0} paths exceeds the 1e7 guard")]
    EnumerationTooLarge { paths: f64 },

    // Normalization config
    #[error("bad homophone map line {line}: {message}")]
    BadHomophoneMap { line: usize, message: String },
    #[error("bad digraph list line {line}: {message}")]
    BadDigraph { line: usize, message: String },

    // Metrics
    #[error("total reference length is zero")]
    ZeroReferenceLength,
    #[error("paired systems cover different utterances; only in A: {only_in_a:?}, only in B: {only_in_b:?}")]
    PairIdMismatch {
        only_in_a: Vec<String>,
        only_in_b: Vec<String>,
    },
    #[error("bootstrap needs at least 2 resamples, got {0}")]
    TooFewResamples(usize),
    #[error("bootstrap requires non-empty references; utterance {0:?} has reference length 0")]
    EmptyReferenceInBootstrap(String),
    #[error("no utterance pairs to score")]
    NoPairs,

    // Manifest / harness
    #[error("line {line}: {message}")]
    ManifestRecord { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("hypotheses missing for utterance ids: {0:?}")]
    MissingHypotheses(Vec<String>),
    #[error("hypothesis ids not present in the manifest: {0:?}")]
    UnmatchedHypotheses(Vec<String>),
    #[error("evaluation set is empty{}", .0.as_ref().map(|s| format!(" for split {s}")).unwrap_or_default())]
    EmptyEvalSet(Option<String>),

    // Lexstats
    #[error("token stream is empty")]
    EmptyStream,
    #[error("token stream yields {got} tokens, fewer than the requested {needed}")]
    StreamTooShort { needed: usize, got: usize },
    #[error("step must be at least 1")]
    ZeroStep,
    #[error("token budget must be at least 1")]
    ZeroBudget,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
