//! JSON-Lines corpus manifests and hypothesis files.
//!
//! One record per line; every failure is reported with its 1-based line
//! number and the offending field.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{Gender, Lang, Split};

/// One corpus utterance. Audio paths are carried but never opened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub language: Lang,
    pub split: Split,
    pub gender: Gender,
    pub duration_s: f64,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_path: Option<String>,
}

/// One system output, keyed to a manifest utterance by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_lang: Option<Lang>,
}

fn parse_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<(usize, T)>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut de = serde_json::Deserializer::from_str(&line);
        let record: T = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::ManifestRecord {
            line: line_no,
            message: e.to_string(),
        })?;
        records.push((line_no, record));
    }
    Ok(records)
}

fn check_unique_ids<'a>(ids: impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    let mut seen: HashSet<&str> = HashSet::new();
    for (line, id) in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId { line, id: id.to_string() });
        }
    }
    Ok(())
}

/// Parses and validates a manifest from any reader.
pub fn parse_manifest(reader: impl BufRead) -> Result<Vec<Utterance>> {
    let records: Vec<(usize, Utterance)> = parse_jsonl(reader)?;
    for (line, utt) in &records {
        if !utt.duration_s.is_finite() || utt.duration_s < 0.0 {
            return Err(Error::ManifestRecord {
                line: *line,
                message: format!("duration_s: must be a finite non-negative number, got {}", utt.duration_s),
            });
        }
        if utt.id.is_empty() {
            return Err(Error::ManifestRecord {
                line: *line,
                message: "id: must not be empty".into(),
            });
        }
    }
    check_unique_ids(records.iter().map(|(l, u)| (*l, u.id.as_str())))?;
    Ok(records.into_iter().map(|(_, u)| u).collect())
}

/// Loads a manifest file (UTF-8 JSON Lines).
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<Utterance>> {
    parse_manifest(BufReader::new(File::open(path)?))
}

/// Parses and validates a hypothesis file from any reader.
pub fn parse_hypotheses(reader: impl BufRead) -> Result<Vec<HypothesisRecord>> {
    let records: Vec<(usize, HypothesisRecord)> = parse_jsonl(reader)?;
    check_unique_ids(records.iter().map(|(l, h)| (*l, h.id.as_str())))?;
    Ok(records.into_iter().map(|(_, h)| h).collect())
}

/// Loads a hypothesis file (UTF-8 JSON Lines).
pub fn load_hypotheses(path: impl AsRef<Path>) -> Result<Vec<HypothesisRecord>> {
    parse_hypotheses(BufReader::new(File::open(path)?))
}

/// Converts simple CSV (`id,language,split,gender,duration_s,text[,audio_path]`
/// with a header) into manifest records, for corpora shipped as CSV.
pub fn manifest_from_csv(reader: impl Read) -> Result<Vec<Utterance>> {
    let mut content = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut content)?;
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::ManifestRecord {
        line: 1,
        message: "missing CSV header".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| columns.iter().position(|c| *c == name);
    let required = |name: &str| {
        col(name).ok_or_else(|| Error::ManifestRecord {
            line: 1,
            message: format!("missing CSV column {name:?}"),
        })
    };
    let id_col = required("id")?;
    let lang_col = required("language")?;
    let split_col = required("split")?;
    let gender_col = required("gender")?;
    let dur_col = required("duration_s")?;
    let text_col = required("text")?;
    let audio_col = col("audio_path");

    let mut out = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let field = |idx: usize, name: &str| -> Result<&str> {
            fields.get(idx).copied().ok_or_else(|| Error::ManifestRecord {
                line: line_no,
                message: format!("missing value for column {name:?}"),
            })
        };
        let record = Utterance {
            id: field(id_col, "id")?.to_string(),
            language: field(lang_col, "language")?.parse().map_err(|e| Error::ManifestRecord {
                line: line_no,
                message: format!("language: {e}"),
            })?,
            split: field(split_col, "split")?.parse().map_err(|e| Error::ManifestRecord {
                line: line_no,
                message: format!("split: {e}"),
            })?,
            gender: match field(gender_col, "gender")? {
                "M" => Gender::Male,
                "F" => Gender::Female,
                "unknown" => Gender::Unknown,
                other => {
                    return Err(Error::ManifestRecord {
                        line: line_no,
                        message: format!("gender: expected M, F or unknown, got {other:?}"),
                    })
                }
            },
            duration_s: field(dur_col, "duration_s")?.parse().map_err(|e| Error::ManifestRecord {
                line: line_no,
                message: format!("duration_s: {e}"),
            })?,
            text: field(text_col, "text")?.to_string(),
            audio_path: audio_col
                .and_then(|c| fields.get(c))
                .map(|s| s.to_string())
                .filter(|s| !s.is_empty()),
        };
        out.push(record);
    }
    let with_lines: Vec<(usize, &str)> = out.iter().enumerate().map(|(i, u)| (i + 2, u.id.as_str())).collect();
    check_unique_ids(with_lines.into_iter())?;
    Ok(out)
}

/// Serializes records back to JSON Lines.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("serializable record"));
        out.push('\n');
    }
    out
}
