//! Per-frame log-probability matrices and their on-disk formats.
//!
//! Binary format: magic `CTCL`, then `T` and `V` as little-endian u32, then
//! `T * V` little-endian f32 values row-major (natural-log probabilities).
//! Text format: a `T V` header line, then `T` lines of `V` decimal floats.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::ctc::log_sum_exp;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CTCL";

/// Row log-normalization tolerance: |logsumexp(row)| must not exceed this.
pub const ROW_TOLERANCE: f64 = 1e-3;

/// A validated `T x V` matrix of log-probabilities.
///
/// Every row is log-normalized within [`ROW_TOLERANCE`] and every value is
/// finite or `-inf`. Construction is the only place malformed logits can be
/// rejected, so downstream CTC kernels never see them.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitMatrix {
    frames: usize,
    vocab_size: usize,
    values: Vec<f64>,
}

impl LogitMatrix {
    pub fn new(frames: usize, vocab_size: usize, values: Vec<f64>) -> Result<Self> {
        if frames == 0 || vocab_size == 0 {
            return Err(Error::EmptyLogits);
        }
        if values.len() != frames * vocab_size {
            return Err(Error::LogitShape {
                expected: frames * vocab_size,
                got: values.len(),
            });
        }
        for (idx, &v) in values.iter().enumerate() {
            if v.is_nan() || v == f64::INFINITY {
                return Err(Error::BadLogitValue {
                    row: idx / vocab_size,
                    col: idx % vocab_size,
                    value: v,
                });
            }
        }
        for row in 0..frames {
            let lse = log_sum_exp(&values[row * vocab_size..(row + 1) * vocab_size]);
            if lse.abs() > ROW_TOLERANCE {
                return Err(Error::UnnormalizedRow { row, logsumexp: lse });
            }
        }
        Ok(LogitMatrix {
            frames,
            vocab_size,
            values,
        })
    }

    /// Builds from per-frame rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let frames = rows.len();
        let vocab_size = rows.first().map_or(0, Vec::len);
        for r in &rows {
            if r.len() != vocab_size {
                return Err(Error::LogitShape {
                    expected: vocab_size,
                    got: r.len(),
                });
            }
        }
        Self::new(frames, vocab_size, rows.into_iter().flatten().collect())
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.vocab_size..(t + 1) * self.vocab_size]
    }

    pub fn get(&self, t: usize, v: usize) -> f64 {
        self.values[t * self.vocab_size + v]
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.frames as u32).to_le_bytes())?;
        w.write_all(&(self.vocab_size as u32).to_le_bytes())?;
        for &v in &self.values {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadLogitMagic);
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let frames = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let vocab_size = u32::from_le_bytes(u32buf) as usize;
        let count = frames
            .checked_mul(vocab_size)
            .ok_or(Error::LogitShape { expected: 0, got: usize::MAX })?;
        let mut bytes = vec![0u8; count * 4];
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        Self::new(frames, vocab_size, values)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.frames, self.vocab_size)?;
        for t in 0..self.frames {
            let row: Vec<String> = self.row(t).iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn read_text(content: &str) -> Result<Self> {
        let mut lines = content.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::LogitParse {
            line: 1,
            message: "missing header line".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::LogitParse {
                line: 1,
                message: format!("expected `T V` header, got {header:?}"),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::LogitParse {
                line: 1,
                message: format!("bad dimension {s:?}: {e}"),
            })
        };
        let frames = parse_dim(dims[0])?;
        let vocab_size = parse_dim(dims[1])?;
        let mut values = Vec::with_capacity(frames * vocab_size);
        let mut rows = 0usize;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            rows += 1;
            for tok in line.split_whitespace() {
                let v = tok.parse::<f64>().map_err(|e| Error::LogitParse {
                    line: i + 1,
                    message: format!("bad value {tok:?}: {e}"),
                })?;
                values.push(v);
            }
            if values.len() != rows * vocab_size {
                return Err(Error::LogitParse {
                    line: i + 1,
                    message: format!("expected {vocab_size} values per row"),
                });
            }
        }
        if rows != frames {
            return Err(Error::LogitParse {
                line: rows + 1,
                message: format!("header declares {frames} rows, found {rows}"),
            });
        }
        Self::new(frames, vocab_size, values)
    }

    /// Loads from a file, auto-detecting binary (by magic) vs text.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        File::open(path.as_ref())?.read_to_end(&mut bytes)?;
        if bytes.starts_with(MAGIC) {
            Self::read_binary(&bytes[..])
        } else {
            let content = String::from_utf8(bytes).map_err(|e| Error::LogitParse {
                line: 0,
                message: format!("file is neither CTCL binary nor UTF-8 text: {e}"),
            })?;
            Self::read_text(&content)
        }
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_binary(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn save_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_text(&mut w)?;
        w.flush()?;
        Ok(())
    }
}
