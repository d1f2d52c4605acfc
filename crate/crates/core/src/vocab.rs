//! Dual-script grapheme vocabulary with a blank symbol and language tokens.
//!
//! Ids are dense: blank is always 0, the five language tokens take ids 1-5,
//! and graphemes follow in a deterministic order (code-point order within each
//! script block, then extra symbols, then corpus-observed symbols).

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::lang::Lang;

pub const BLANK_SYMBOL: &str = "<blank>";
pub const UNK_SYMBOL: &str = "<unk>";

/// Assigned Ethiopic syllables in the basic Unicode block (inclusive ranges).
/// These 326 code points are the core Ge'ez grapheme inventory; the block's
/// combining marks, punctuation and numerals are excluded.
const GEEZ_CORE_RANGES: &[(u32, u32)] = &[
    (0x1200, 0x1248),
    (0x124A, 0x124D),
    (0x1250, 0x1256),
    (0x1258, 0x1258),
    (0x125A, 0x125D),
    (0x1260, 0x1288),
    (0x128A, 0x128D),
    (0x1290, 0x12B0),
    (0x12B2, 0x12B5),
    (0x12B8, 0x12BE),
    (0x12C0, 0x12C0),
    (0x12C2, 0x12C5),
    (0x12C8, 0x12D6),
    (0x12D8, 0x1310),
    (0x1312, 0x1315),
    (0x1318, 0x135A),
];

const ETHIOPIC_PUNCT_NUMERALS: &str = include_str!("../data/ethiopic_punct_numerals.txt");
const LATIN_PUNCT_NUMERALS: &str = include_str!("../data/latin_punct_numerals.txt");

/// Iterates the 326 core Ge'ez graphemes in code-point order.
pub fn geez_core_symbols() -> impl Iterator<Item = char> {
    GEEZ_CORE_RANGES
        .iter()
        .flat_map(|&(lo, hi)| (lo..=hi).map(|c| char::from_u32(c).expect("assigned code point")))
}

fn block_lines(data: &'static str) -> impl Iterator<Item = &'static str> {
    // Symbol-per-line data; a line may be a single space, so no trimming.
    data.split('\n').filter(|l| !l.is_empty())
}

/// The 29 Ethiopic punctuation marks and numerals shipped as defaults.
pub fn ethiopic_punct_numeral_symbols() -> impl Iterator<Item = &'static str> {
    block_lines(ETHIOPIC_PUNCT_NUMERALS)
}

/// The 25 Latin punctuation marks and numerals (including the word space).
pub fn latin_punct_numeral_symbols() -> impl Iterator<Item = &'static str> {
    block_lines(LATIN_PUNCT_NUMERALS)
}

/// Which symbol blocks a vocabulary is built from.
#[derive(Debug, Clone)]
pub struct VocabConfig {
    /// 326 core Ge'ez graphemes.
    pub include_geez_core: bool,
    /// 29 Ethiopic punctuation marks and numerals.
    pub include_ethiopic_punct_numerals: bool,
    /// 26 lowercase Latin letters.
    pub include_latin_letters: bool,
    /// 25 Latin punctuation marks and numerals (including space).
    pub include_latin_punct_numerals: bool,
    /// Default encoding mode consumers should use with this vocabulary.
    pub strict_unknowns: bool,
    /// Additional symbols appended after the blocks, e.g. `<unk>`.
    pub extra_symbols: Vec<String>,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            include_geez_core: true,
            include_ethiopic_punct_numerals: true,
            include_latin_letters: true,
            include_latin_punct_numerals: true,
            strict_unknowns: false,
            extra_symbols: Vec::new(),
        }
    }
}

impl VocabConfig {
    fn any_block(&self) -> bool {
        self.include_geez_core
            || self.include_ethiopic_punct_numerals
            || self.include_latin_letters
            || self.include_latin_punct_numerals
    }
}

/// Immutable bidirectional symbol/id table.
#[derive(Debug, Clone)]
pub struct GraphemeVocab {
    symbols: Vec<String>,
    id_of: HashMap<String, usize>,
    lid_ids: Vec<(Lang, usize)>,
    unk_id: Option<usize>,
    strict_unknowns: bool,
}

/// A CTC training target: language-token id followed by grapheme ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSequence {
    pub lang_id: usize,
    pub grapheme_ids: Vec<usize>,
}

impl TargetSequence {
    /// Flat label sequence `[lang_id, g1, ..., gN]` as consumed by CTC.
    pub fn flat(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(1 + self.grapheme_ids.len());
        out.push(self.lang_id);
        out.extend_from_slice(&self.grapheme_ids);
        out
    }

    pub fn len(&self) -> usize {
        1 + self.grapheme_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always carries the language token
    }
}

/// Builds a vocabulary from `config` and, optionally, observed corpus lines.
///
/// Order: blank, the five language tokens, enabled blocks in code-point order,
/// extra symbols, then corpus symbols not already present (code-point order).
pub fn build_vocab(config: &VocabConfig, corpus_lines: Option<&[(Lang, String)]>) -> Result<GraphemeVocab> {
    let has_corpus = corpus_lines.is_some_and(|c| !c.is_empty());
    if !config.any_block() && !has_corpus && config.extra_symbols.is_empty() {
        return Err(Error::EmptyVocabConfig);
    }

    let mut symbols: Vec<String> = Vec::with_capacity(420);
    symbols.push(BLANK_SYMBOL.to_string());
    for lang in Lang::ALL {
        symbols.push(lang.token().to_string());
    }

    if config.include_geez_core {
        symbols.extend(geez_core_symbols().map(String::from));
    }
    if config.include_ethiopic_punct_numerals {
        symbols.extend(ethiopic_punct_numeral_symbols().map(String::from));
    }
    if config.include_latin_letters {
        symbols.extend(('a'..='z').map(String::from));
    }
    if config.include_latin_punct_numerals {
        symbols.extend(latin_punct_numeral_symbols().map(String::from));
    }

    let mut seen: HashSet<String> = symbols.iter().cloned().collect();
    for extra in &config.extra_symbols {
        validate_symbol(extra)?;
        if !seen.insert(extra.clone()) {
            return Err(Error::DuplicateSymbol(extra.clone()));
        }
        symbols.push(extra.clone());
    }

    if let Some(lines) = corpus_lines {
        let mut observed: Vec<char> = Vec::new();
        for (_, text) in lines {
            observed.extend(text.nfc());
        }
        observed.sort_unstable();
        observed.dedup();
        for ch in observed {
            let s = ch.to_string();
            if seen.insert(s.clone()) {
                symbols.push(s);
            }
        }
    }

    GraphemeVocab::from_symbols(symbols, config.strict_unknowns)
}

impl GraphemeVocab {
    /// Builds directly from an ordered symbol list. Line 0 must be the blank.
    pub fn from_symbols(symbols: Vec<String>, strict_unknowns: bool) -> Result<Self> {
        if symbols.first().map(String::as_str) != Some(BLANK_SYMBOL) {
            return Err(Error::InvalidSymbol(format!(
                "first symbol must be {BLANK_SYMBOL}, got {:?}",
                symbols.first().cloned().unwrap_or_default()
            )));
        }
        let mut id_of = HashMap::with_capacity(symbols.len());
        let mut lid_ids = Vec::new();
        let mut unk_id = None;
        for (id, sym) in symbols.iter().enumerate() {
            validate_symbol(sym)?;
            if id_of.insert(sym.clone(), id).is_some() {
                return Err(Error::DuplicateSymbol(sym.clone()));
            }
            if let Some(lang) = Lang::from_token(sym) {
                lid_ids.push((lang, id));
            } else if sym == UNK_SYMBOL {
                unk_id = Some(id);
            }
        }
        Ok(GraphemeVocab {
            symbols,
            id_of,
            lid_ids,
            unk_id,
            strict_unknowns,
        })
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn blank_id(&self) -> usize {
        0
    }

    pub fn unk_id(&self) -> Option<usize> {
        self.unk_id
    }

    pub fn strict_unknowns(&self) -> bool {
        self.strict_unknowns
    }

    pub fn symbol(&self, id: usize) -> Option<&str> {
        self.symbols.get(id).map(String::as_str)
    }

    pub fn id(&self, symbol: &str) -> Option<usize> {
        self.id_of.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(String::as_str)
    }

    /// Id of a language token, if present.
    pub fn lid_id(&self, lang: Lang) -> Option<usize> {
        self.lid_ids.iter().find(|(l, _)| *l == lang).map(|(_, id)| *id)
    }

    /// The language whose token has this id, if any.
    pub fn lang_of_id(&self, id: usize) -> Option<Lang> {
        self.lid_ids.iter().find(|(_, i)| *i == id).map(|(l, _)| *l)
    }

    pub fn is_lid(&self, id: usize) -> bool {
        self.lang_of_id(id).is_some()
    }

    /// Encodes text as a language token followed by one id per grapheme.
    ///
    /// Text is NFC-normalized first; one Unicode scalar is one grapheme. In
    /// non-strict mode unknown graphemes map to `<unk>` when the vocabulary
    /// has one, otherwise encoding fails.
    pub fn encode_target(&self, text: &str, lang: Lang, strict: bool) -> Result<TargetSequence> {
        let lang_id = self.lid_id(lang).ok_or(Error::MissingLidToken(lang.token()))?;
        let normalized: String = text.nfc().collect();
        if normalized.is_empty() {
            return Err(Error::EmptyText);
        }
        let mut grapheme_ids = Vec::with_capacity(normalized.chars().count());
        let mut buf = [0u8; 4];
        for (position, ch) in normalized.chars().enumerate() {
            let sym: &str = ch.encode_utf8(&mut buf);
            match self.id_of.get(sym) {
                Some(&id) => grapheme_ids.push(id),
                None if strict => return Err(Error::UnknownGrapheme { grapheme: ch, position }),
                None => match self.unk_id {
                    Some(unk) => grapheme_ids.push(unk),
                    None => return Err(Error::NoUnkSymbol { grapheme: ch, position }),
                },
            }
        }
        Ok(TargetSequence { lang_id, grapheme_ids })
    }

    /// Inverse of [`encode_target`](Self::encode_target): a leading language
    /// token is stripped and reported; the remaining ids are concatenated.
    ///
    /// Blank ids and non-initial language tokens are rejected.
    pub fn decode_ids(&self, ids: &[usize]) -> Result<(Option<Lang>, String)> {
        let mut lang = None;
        let mut text = String::new();
        for (position, &id) in ids.iter().enumerate() {
            if id >= self.size() {
                return Err(Error::IdOutOfRange { id, size: self.size() });
            }
            if id == self.blank_id() {
                return Err(Error::BlankInSequence(id));
            }
            match self.lang_of_id(id) {
                Some(l) if position == 0 => lang = Some(l),
                Some(l) => {
                    return Err(Error::MisplacedLidToken {
                        symbol: l.token().to_string(),
                        position,
                    })
                }
                None => text.push_str(&self.symbols[id]),
            }
        }
        Ok((lang, text))
    }

    /// Writes the vocabulary as UTF-8 text, one symbol per line (line = id).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for sym in &self.symbols {
            writeln!(w, "{sym}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a vocabulary written by [`save`](Self::save). Duplicate lines
    /// are rejected; line 0 must be `<blank>`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut content = String::new();
        File::open(path)?.read_to_string(&mut content)?;
        Self::from_text(&content)
    }

    /// Parses the one-symbol-per-line format from a string.
    pub fn from_text(content: &str) -> Result<Self> {
        let mut lines: Vec<&str> = content.split('\n').collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        let symbols: Vec<String> = lines
            .iter()
            .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
            .collect();
        Self::from_symbols(symbols, false)
    }
}

fn validate_symbol(sym: &str) -> Result<()> {
    if sym.is_empty() || sym.contains('\n') || sym.contains('\r') {
        return Err(Error::InvalidSymbol(sym.to_string()));
    }
    Ok(())
}
