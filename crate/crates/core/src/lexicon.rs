//! Sentiment lexicon: word-to-strength lookup in `[-1, 1]`.
//!
//! Entries are keyed by *normalized* word form so that lexicon lookup and
//! text ingestion agree on spelling. Files whose strengths exceed the unit
//! interval are rescaled by the maximum absolute value, preserving relative
//! intensity; words absent from the lexicon read as exactly `0.0`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::ingest::Normalizer;
use crate::sentence::DepSentence;

/// Errors raised while reading a lexicon file.
#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// Bookkeeping from lexicon construction, for optional diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LexiconStats {
    /// Distinct words kept.
    pub entries: usize,
    /// Entries that overwrote an earlier entry for the same normalized word.
    pub duplicates: usize,
    /// Entries dropped because their word normalized to the empty string.
    pub dropped_empty: usize,
    /// Divisor applied to bring strengths into `[-1, 1]`, when one was needed.
    pub rescale_factor: Option<f64>,
}

/// Word-polarity lexicon with normalized keys and strengths in `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    map: HashMap<String, f64>,
}

impl Lexicon {
    /// Builds a lexicon from `(word, strength)` pairs.
    ///
    /// Words are normalized; among entries sharing a normalized form the last
    /// one wins. If any strength magnitude exceeds 1, every strength is
    /// divided by the maximum magnitude.
    pub fn from_entries<I>(entries: I, normalizer: &Normalizer) -> (Self, LexiconStats)
    where
        I: IntoIterator<Item = (String, f64)>,
    {
        let mut map: HashMap<String, f64> = HashMap::new();
        let mut stats = LexiconStats::default();
        for (word, strength) in entries {
            let key = normalizer.normalize(&word);
            if key.is_empty() {
                stats.dropped_empty += 1;
                continue;
            }
            if map.insert(key, strength).is_some() {
                stats.duplicates += 1;
            }
        }
        let max_abs = map.values().fold(0.0f64, |m, s| m.max(s.abs()));
        if max_abs > 1.0 {
            for s in map.values_mut() {
                *s /= max_abs;
            }
            stats.rescale_factor = Some(max_abs);
        }
        stats.entries = map.len();
        (Lexicon { map }, stats)
    }

    /// Reads a lexicon from a `word<TAB>strength` TSV file. See
    /// [`Lexicon::parse`].
    pub fn load(path: &Path, normalizer: &Normalizer) -> Result<(Self, LexiconStats), LexiconError> {
        let content = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&content, normalizer)
    }

    /// Parses `word<TAB>strength` lines; blank lines and `#` comments are
    /// skipped, malformed lines are reported with their line number.
    pub fn parse(
        content: &str,
        normalizer: &Normalizer,
    ) -> Result<(Self, LexiconStats), LexiconError> {
        let mut entries = Vec::new();
        for (i, raw) in content.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (word, strength) = line.split_once('\t').ok_or_else(|| LexiconError::Format {
                line: lineno,
                reason: "expected word<TAB>strength".to_string(),
            })?;
            let strength: f64 = strength.trim().parse().map_err(|_| LexiconError::Format {
                line: lineno,
                reason: format!("non-numeric strength {:?}", strength),
            })?;
            entries.push((word.to_string(), strength));
        }
        Ok(Self::from_entries(entries, normalizer))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn contains(&self, normalized_word: &str) -> bool {
        self.map.contains_key(normalized_word)
    }

    /// Strength of a normalized word; exactly `0.0` for words not present.
    pub fn lookup(&self, normalized_word: &str) -> f64 {
        self.map.get(normalized_word).copied().unwrap_or(0.0)
    }

    /// Returns a copy of `sentence` whose token strengths are the lexicon
    /// strengths of each token's normalized form.
    pub fn assign_strengths(&self, sentence: &DepSentence) -> DepSentence {
        let strengths: Vec<f64> = sentence
            .tokens()
            .iter()
            .map(|t| self.lookup(&t.normalized))
            .collect();
        sentence.with_strengths(&strengths)
    }
}
