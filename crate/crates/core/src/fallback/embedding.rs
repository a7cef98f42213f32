//! Word-embedding table and sentence vectorization.
//!
//! The on-disk format is the plain text `.vec` layout: a header line with
//! the declared word count and dimensionality, then one line per word with
//! its space-separated vector components.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// Failures while reading an embedding file.
#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("failed to read embeddings {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("embeddings line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("embeddings line {line}: expected {expected} components, found {found}")]
    DimMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
}

/// Result of loading an embedding file: the table plus the declared and
/// actually loaded word counts.
///
/// A mismatch between the two is tolerated (later rows simply win over the
/// header's promise) but worth surfacing as a warning.
#[derive(Debug)]
pub struct EmbeddingLoad {
    pub table: EmbeddingTable,
    pub declared: usize,
    pub loaded: usize,
}

/// Word-to-vector lookup with a fixed dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    map: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Builds a table from `(word, vector)` pairs; later duplicates win.
    ///
    /// Panics if a vector's length differs from `dim`.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (String, Vec<f64>)>) -> Self {
        let mut map = HashMap::new();
        for (word, vec) in entries {
            assert_eq!(vec.len(), dim, "embedding vector length must equal dim");
            map.insert(word, vec);
        }
        EmbeddingTable { dim, map }
    }

    /// Reads a `.vec` file; see [`EmbeddingTable::parse`].
    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingLoad, EmbeddingError> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        EmbeddingTable::parse(&content)
    }

    /// Parses the `.vec` text format.
    ///
    /// The first non-empty line must be `count dim`; every following
    /// non-empty line is `word c1 c2 … c_dim`. Rows whose component count
    /// differs from `dim` are an error; a word appearing twice keeps the
    /// later row.
    pub fn parse(content: &str) -> Result<EmbeddingLoad, EmbeddingError> {
        let mut lines = content.lines().enumerate();
        let (header_line, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| EmbeddingError::Format {
                line: 1,
                reason: "missing `count dim` header".to_string(),
            })?;
        let mut parts = header.split_whitespace();
        let declared: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| EmbeddingError::Format {
                line: header_line + 1,
                reason: "header must start with the word count".to_string(),
            })?;
        let dim: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .filter(|&d| d > 0)
            .ok_or_else(|| EmbeddingError::Format {
                line: header_line + 1,
                reason: "header must name a positive dimensionality".to_string(),
            })?;
        if parts.next().is_some() {
            return Err(EmbeddingError::Format {
                line: header_line + 1,
                reason: "header must be exactly `count dim`".to_string(),
            });
        }
        let mut map = HashMap::with_capacity(declared);
        for (idx, raw) in lines {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let mut parts = raw.split_whitespace();
            let word = parts.next().expect("non-empty line has a first field");
            let mut vec = Vec::with_capacity(dim);
            for part in parts {
                let value: f64 = part.parse().map_err(|_| EmbeddingError::Format {
                    line,
                    reason: format!("bad component `{part}`"),
                })?;
                vec.push(value);
            }
            if vec.len() != dim {
                return Err(EmbeddingError::DimMismatch {
                    line,
                    expected: dim,
                    found: vec.len(),
                });
            }
            map.insert(word.to_string(), vec);
        }
        let loaded = map.len();
        Ok(EmbeddingLoad {
            table: EmbeddingTable { dim, map },
            declared,
            loaded,
        })
    }

    /// Dimensionality of every vector in the table.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Vector for `word`, if present.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.map.get(word).map(Vec::as_slice)
    }

    /// Fixed-length sentence vector: the embeddings of the first
    /// `max_words` words concatenated in order, zero-padded at the end.
    ///
    /// Out-of-vocabulary words contribute a zero vector; words beyond
    /// `max_words` are dropped. The result always has length
    /// `max_words * dim`.
    pub fn vectorize(&self, words: &[&str], max_words: usize) -> Vec<f64> {
        let mut out = vec![0.0; max_words * self.dim];
        for (i, word) in words.iter().take(max_words).enumerate() {
            if let Some(vec) = self.map.get(*word) {
                out[i * self.dim..(i + 1) * self.dim].copy_from_slice(vec);
            }
        }
        out
    }
}
