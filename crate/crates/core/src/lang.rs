//! The closed set of language codes and their scripts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the five supported languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Lang {
    #[serde(rename = "AMH")]
    Amh,
    #[serde(rename = "TIR")]
    Tir,
    #[serde(rename = "ORM")]
    Orm,
    #[serde(rename = "SID")]
    Sid,
    #[serde(rename = "WAL")]
    Wal,
}

/// Writing system of a language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Script {
    Ethiopic,
    Latin,
}

impl Lang {
    /// All languages in canonical order. Language-token ids follow this order.
    pub const ALL: [Lang; 5] = [Lang::Amh, Lang::Tir, Lang::Orm, Lang::Sid, Lang::Wal];

    /// Three-letter ISO-style code, e.g. `"AMH"`.
    pub fn code(self) -> &'static str {
        match self {
            Lang::Amh => "AMH",
            Lang::Tir => "TIR",
            Lang::Orm => "ORM",
            Lang::Sid => "SID",
            Lang::Wal => "WAL",
        }
    }

    /// Vocabulary token form, e.g. `"[AMH]"`.
    pub fn token(self) -> &'static str {
        match self {
            Lang::Amh => "[AMH]",
            Lang::Tir => "[TIR]",
            Lang::Orm => "[ORM]",
            Lang::Sid => "[SID]",
            Lang::Wal => "[WAL]",
        }
    }

    pub fn script(self) -> Script {
        match self {
            Lang::Amh | Lang::Tir => Script::Ethiopic,
            Lang::Orm | Lang::Sid | Lang::Wal => Script::Latin,
        }
    }

    /// Parses a code such as `"AMH"` (case-insensitive).
    pub fn from_code(code: &str) -> Option<Lang> {
        match code.to_ascii_uppercase().as_str() {
            "AMH" => Some(Lang::Amh),
            "TIR" => Some(Lang::Tir),
            "ORM" => Some(Lang::Orm),
            "SID" => Some(Lang::Sid),
            "WAL" => Some(Lang::Wal),
            _ => None,
        }
    }

    /// Parses a vocabulary token such as `"[AMH]"`.
    pub fn from_token(token: &str) -> Option<Lang> {
        let inner = token.strip_prefix('[')?.strip_suffix(']')?;
        // Token form is exact; only the bare code is case-insensitive.
        Lang::ALL.iter().copied().find(|l| l.code() == inner)
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lang::from_code(s).ok_or_else(|| Error::UnknownLanguage(s.to_string()))
    }
}

/// Speaker gender as recorded in manifests (self-identified, may be unknown).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    #[serde(rename = "M")]
    Male,
    #[serde(rename = "F")]
    Female,
    #[serde(rename = "unknown")]
    Unknown,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Male => "M",
            Gender::Female => "F",
            Gender::Unknown => "unknown",
        })
    }
}

/// Dataset split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}
