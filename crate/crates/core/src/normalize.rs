//! Script-aware text normalization.
//!
//! Two families of transforms share one config: evaluation normalization
//! (punctuation removal, Ge'ez homophone folding) applied before scoring, and
//! analytical normalization (vowel-length and gemination collapse) used to
//! attribute errors in the Latin-script languages. The collapses merge
//! lexically distinct words, so they are for analysis only; never apply them
//! to training data.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::OnceLock;

use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::error::{Error, Result};
use crate::lang::{Lang, Script};

const DEFAULT_HOMOPHONES_TSV: &str = include_str!("../data/homophones.tsv");
const DEFAULT_DIGRAPHS_TXT: &str = include_str!("../data/digraphs.txt");

/// Ethiopic wordspace; mapped to a plain space during punctuation handling.
const ETHIOPIC_WORDSPACE: char = '\u{1361}';

/// Flags and tables steering [`apply_pipeline`].
#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    pub remove_punctuation: bool,
    pub fold_homophones: bool,
    pub collapse_vowel_length: bool,
    pub collapse_gemination: bool,
    /// Hyphens are word-internal in Oromo orthography; kept unless set.
    pub remove_hyphens: bool,
    /// The apostrophe writes the glottal stop in the Latin-script languages.
    pub preserve_apostrophe: bool,
    pub lowercase_latin: bool,
    /// Consonant digraphs treated as single units, e.g. `sh`, `dh`.
    pub digraphs: Vec<String>,
    /// Ge'ez homophone folding table (grapheme to grapheme).
    pub homophone_map: HashMap<char, char>,
}

impl NormalizationConfig {
    /// Identity pipeline: NFC only.
    pub fn none() -> Self {
        NormalizationConfig {
            remove_punctuation: false,
            fold_homophones: false,
            collapse_vowel_length: false,
            collapse_gemination: false,
            remove_hyphens: false,
            preserve_apostrophe: true,
            lowercase_latin: false,
            digraphs: default_digraphs().to_vec(),
            homophone_map: default_homophone_map().clone(),
        }
    }

    /// Scoring normalization: lowercase, punctuation removal, homophone folding.
    pub fn eval() -> Self {
        NormalizationConfig {
            remove_punctuation: true,
            fold_homophones: true,
            lowercase_latin: true,
            ..Self::none()
        }
    }

    /// Eval plus vowel-length collapse.
    pub fn vowel() -> Self {
        NormalizationConfig {
            collapse_vowel_length: true,
            ..Self::eval()
        }
    }

    /// Eval plus gemination collapse.
    pub fn geminate() -> Self {
        NormalizationConfig {
            collapse_gemination: true,
            ..Self::eval()
        }
    }

    /// Eval plus both collapses.
    pub fn both() -> Self {
        NormalizationConfig {
            collapse_vowel_length: true,
            collapse_gemination: true,
            ..Self::eval()
        }
    }

    /// Everything on, including hyphen removal.
    pub fn full() -> Self {
        NormalizationConfig {
            remove_hyphens: true,
            ..Self::both()
        }
    }
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self::eval()
    }
}

/// Named normalization profiles exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormProfile {
    None,
    Eval,
    Vowel,
    Geminate,
    Both,
    Full,
}

impl NormProfile {
    pub const ALL: [NormProfile; 6] = [
        NormProfile::None,
        NormProfile::Eval,
        NormProfile::Vowel,
        NormProfile::Geminate,
        NormProfile::Both,
        NormProfile::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NormProfile::None => "none",
            NormProfile::Eval => "eval",
            NormProfile::Vowel => "vowel",
            NormProfile::Geminate => "geminate",
            NormProfile::Both => "both",
            NormProfile::Full => "full",
        }
    }

    pub fn to_config(self) -> NormalizationConfig {
        match self {
            NormProfile::None => NormalizationConfig::none(),
            NormProfile::Eval => NormalizationConfig::eval(),
            NormProfile::Vowel => NormalizationConfig::vowel(),
            NormProfile::Geminate => NormalizationConfig::geminate(),
            NormProfile::Both => NormalizationConfig::both(),
            NormProfile::Full => NormalizationConfig::full(),
        }
    }
}

impl FromStr for NormProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        NormProfile::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown normalization profile {s:?} (expected none, eval, vowel, geminate, both, full)"))
    }
}

/// Default Ge'ez homophone folding table: the four classical families
/// (ha, sa, glottal-a, tsa) folded per vowel order.
pub fn default_homophone_map() -> &'static HashMap<char, char> {
    static MAP: OnceLock<HashMap<char, char>> = OnceLock::new();
    MAP.get_or_init(|| parse_homophone_map(DEFAULT_HOMOPHONES_TSV).expect("bundled map is valid"))
}

/// Default digraph list for the Latin-script languages.
pub fn default_digraphs() -> &'static [String] {
    static LIST: OnceLock<Vec<String>> = OnceLock::new();
    LIST.get_or_init(|| parse_digraphs(DEFAULT_DIGRAPHS_TXT).expect("bundled list is valid"))
}

/// Parses a `source<TAB>target` table and checks it is idempotent: no target
/// may itself be remapped elsewhere.
pub fn parse_homophone_map(content: &str) -> Result<HashMap<char, char>> {
    let mut map = HashMap::new();
    let mut source_lines: HashMap<char, usize> = HashMap::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (src, tgt) = match (parts.next(), parts.next(), parts.next()) {
            (Some(s), Some(t), None) => (s, t),
            _ => {
                return Err(Error::BadHomophoneMap {
                    line: line_no,
                    message: "expected exactly `source<TAB>target`".into(),
                })
            }
        };
        let single = |s: &str, which: &str| -> Result<char> {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::BadHomophoneMap {
                    line: line_no,
                    message: format!("{which} must be a single grapheme, got {s:?}"),
                }),
            }
        };
        let src = single(src, "source")?;
        let tgt = single(tgt, "target")?;
        if map.insert(src, tgt).is_some() {
            return Err(Error::BadHomophoneMap {
                line: line_no,
                message: format!("duplicate source {src:?}"),
            });
        }
        source_lines.insert(src, line_no);
    }
    for (&src, &tgt) in &map {
        if let Some(&next) = map.get(&tgt) {
            if next != tgt {
                return Err(Error::BadHomophoneMap {
                    line: source_lines[&src],
                    message: format!("target {tgt:?} of {src:?} is itself remapped; map must be idempotent"),
                });
            }
        }
    }
    Ok(map)
}

/// Parses a digraph list, one per line. Digraphs must be ASCII letters,
/// at least two characters, and unique.
pub fn parse_digraphs(content: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        let d = line.trim();
        if d.is_empty() {
            continue;
        }
        if d.len() < 2 || !d.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(Error::BadDigraph {
                line: line_no,
                message: format!("digraph must be two or more ASCII letters, got {d:?}"),
            });
        }
        if out.iter().any(|x| x == d) {
            return Err(Error::BadDigraph {
                line: line_no,
                message: format!("duplicate digraph {d:?}"),
            });
        }
        out.push(d.to_string());
    }
    Ok(out)
}

fn is_punctuation(ch: char) -> bool {
    ch.general_category_group() == GeneralCategoryGroup::Punctuation
}

/// Removes Ethiopic and Latin punctuation and re-collapses whitespace.
///
/// The Ethiopic wordspace becomes a plain space; the apostrophe survives when
/// `preserve_apostrophe` is set (curly forms are unified to U+0027 first);
/// hyphens survive unless `remove_hyphens` is set. Numerals are untouched.
pub fn remove_punct(text: &str, config: &NormalizationConfig) -> String {
    let mut cleaned = String::with_capacity(text.len());
    for ch in text.chars() {
        let ch = match ch {
            '\u{2019}' | '\u{02BC}' => '\'',
            c => c,
        };
        if ch == ETHIOPIC_WORDSPACE {
            cleaned.push(' ');
        } else if ch == '\'' {
            if config.preserve_apostrophe {
                cleaned.push(ch);
            }
        } else if ch == '-' {
            if !config.remove_hyphens {
                cleaned.push(ch);
            }
        } else if !is_punctuation(ch) {
            cleaned.push(ch);
        }
    }
    let mut out = String::with_capacity(cleaned.len());
    for word in cleaned.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Replaces each grapheme by its homophone-class representative.
pub fn fold_homophones(text: &str, map: &HashMap<char, char>) -> String {
    text.chars().map(|c| map.get(&c).copied().unwrap_or(c)).collect()
}

/// Segments text into digraph units (longest match first) and single scalars.
fn segment<'a>(text: &'a str, digraphs: &[String]) -> Vec<&'a str> {
    let mut sorted: Vec<&str> = digraphs.iter().map(String::as_str).collect();
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut units = Vec::new();
    let mut rest = text;
    'outer: while !rest.is_empty() {
        for d in &sorted {
            if rest.starts_with(d) {
                units.push(&rest[..d.len()]);
                rest = &rest[d.len()..];
                continue 'outer;
            }
        }
        let len = rest.chars().next().expect("non-empty").len_utf8();
        units.push(&rest[..len]);
        rest = &rest[len..];
    }
    units
}

fn is_vowel_unit(unit: &str) -> bool {
    let mut chars = unit.chars();
    matches!(
        (chars.next(), chars.next()),
        (Some('a' | 'e' | 'i' | 'o' | 'u'), None)
    )
}

fn is_consonant_unit(unit: &str) -> bool {
    !unit.is_empty() && unit.chars().all(|c| c.is_ascii_alphabetic()) && !is_vowel_unit(unit)
}

fn collapse_units(text: &str, digraphs: &[String], should_collapse: fn(&str) -> bool) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<&str> = None;
    for unit in segment(text, digraphs) {
        if prev == Some(unit) && should_collapse(unit) {
            continue;
        }
        out.push_str(unit);
        prev = Some(unit);
    }
    out
}

/// Reduces runs of an identical vowel letter to one occurrence (`aa` -> `a`).
/// Digraph units are segmented first, so letters inside a digraph never merge
/// with neighbours across the boundary.
pub fn collapse_vowels(text: &str, digraphs: &[String]) -> String {
    collapse_units(text, digraphs, is_vowel_unit)
}

/// Reduces runs of an identical consonant unit to one (`dd` -> `d`,
/// `shsh` -> `sh`); vowels are untouched.
pub fn collapse_geminates(text: &str, digraphs: &[String]) -> String {
    collapse_units(text, digraphs, is_consonant_unit)
}

/// Runs the full pipeline for one language:
/// NFC, lowercase (Latin), punctuation removal, homophone folding (Ge'ez),
/// vowel-length collapse (Latin), gemination collapse (Latin), each gated by
/// its config flag.
pub fn apply_pipeline(text: &str, lang: Lang, config: &NormalizationConfig) -> String {
    let mut s: String = text.nfc().collect();
    let latin = lang.script() == Script::Latin;
    if latin && config.lowercase_latin {
        s = s.to_lowercase();
    }
    if config.remove_punctuation {
        s = remove_punct(&s, config);
    }
    if !latin && config.fold_homophones {
        s = fold_homophones(&s, &config.homophone_map);
    }
    if latin && config.collapse_vowel_length {
        s = collapse_vowels(&s, &config.digraphs);
    }
    if latin && config.collapse_gemination {
        s = collapse_geminates(&s, &config.digraphs);
    }
    s
}
