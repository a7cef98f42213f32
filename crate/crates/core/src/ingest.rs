//! Text ingestion: tokenization, normalization, the dependency-tree reader
//! and the labelled-corpus reader.
//!
//! Informal Persian product reviews arrive noisy: elongated spellings
//! (`عالییییی`), digit-for-letter substitutions (`mr30`), stray punctuation
//! and emoticons. Normalization canonicalizes tokens before lexicon lookup;
//! emoticons are detected first and carried out-of-band so that punctuation
//! stripping cannot destroy them.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::sentence::{DepArc, DepSentence, EmojiClass, Token, TreeError};

/// Upper bound on normalization passes; guards against pathological mapping
/// tables that chain or cycle.
const MAX_NORMALIZE_PASSES: usize = 8;

/// Errors raised while reading trees or corpora.
#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A malformed line (wrong field count, non-numeric index, out-of-order
    /// token id, missing tab separator).
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    /// A sentence block whose arcs do not form a valid tree.
    #[error("sentence {sentence}: {source}")]
    Tree {
        sentence: usize,
        #[source]
        source: TreeError,
    },
    /// A corpus label outside the accepted set.
    #[error("line {line}: unknown label {found:?} (expected \"pos\" or \"neg\")")]
    Label { line: usize, found: String },
}

/// Gold sentiment label of a corpus record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Pos,
    Neg,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Pos => f.write_str("pos"),
            Label::Neg => f.write_str("neg"),
        }
    }
}

/// A labelled raw-text corpus: one `(label, text)` record per sentence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawCorpus {
    pub records: Vec<(Label, String)>,
}

impl RawCorpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Gold labels in record order.
    pub fn labels(&self) -> Vec<Label> {
        self.records.iter().map(|(l, _)| *l).collect()
    }
}

/// The emoticon inventory used both by the tokenizer (emoticons become their
/// own tokens) and by emoji extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmojiTable {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

impl Default for EmojiTable {
    fn default() -> Self {
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        EmojiTable {
            positive: own(&[":-)", ":)", ":-]", ":]", ":D"]),
            negative: own(&[":(", ":-((", ":'("]),
        }
    }
}

impl EmojiTable {
    /// Exact-match classification of a whole token.
    pub fn classify(&self, token: &str) -> Option<EmojiClass> {
        if self.positive.iter().any(|e| e == token) {
            Some(EmojiClass::Positive)
        } else if self.negative.iter().any(|e| e == token) {
            Some(EmojiClass::Negative)
        } else {
            None
        }
    }

    /// Longest emoticon that `text` starts with, as `(byte_len, class)`.
    fn longest_prefix(&self, text: &str) -> Option<(usize, EmojiClass)> {
        let mut best: Option<(usize, EmojiClass)> = None;
        let scan = self
            .positive
            .iter()
            .map(|e| (e, EmojiClass::Positive))
            .chain(self.negative.iter().map(|e| (e, EmojiClass::Negative)));
        for (e, class) in scan {
            if text.starts_with(e.as_str()) && best.map_or(true, |(l, _)| e.len() > l) {
                best = Some((e.len(), class));
            }
        }
        best
    }
}

/// Token normalizer: informal-spelling map, elongation collapse, digit and
/// punctuation removal.
#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    map: HashMap<String, String>,
}

impl Normalizer {
    /// Normalizer with the bundled informal-spelling entries.
    pub fn with_default_map() -> Self {
        let mut map = HashMap::new();
        map.insert("mr30".to_string(), "mersi".to_string());
        map.insert("عالییییی".to_string(), "عالی".to_string());
        Normalizer { map }
    }

    /// Reads a two-column TSV of `variant<TAB>canonical` rewrite entries.
    pub fn from_map_file(path: &Path) -> Result<Self, IngestError> {
        let content = fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_map_str(&content)
    }

    /// Parses rewrite entries from TSV text; blank lines and `#` comments are
    /// skipped.
    pub fn from_map_str(content: &str) -> Result<Self, IngestError> {
        let mut map = HashMap::new();
        for (i, raw) in content.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (variant, canonical) = line.split_once('\t').ok_or(IngestError::Format {
                line: i + 1,
                reason: "expected variant<TAB>canonical".to_string(),
            })?;
            map.insert(variant.to_string(), canonical.to_string());
        }
        Ok(Normalizer { map })
    }

    pub fn map_len(&self) -> usize {
        self.map.len()
    }

    /// Canonicalizes one token: apply the rewrite map, collapse character
    /// elongations (three or more repeats of one character become one), and
    /// delete digits, punctuation and zero-width joiners. The pipeline is run
    /// to a fixed point so that normalization is idempotent.
    pub fn normalize(&self, token: &str) -> String {
        let mut cur = token.to_string();
        for _ in 0..MAX_NORMALIZE_PASSES {
            let mapped = match self.map.get(&cur) {
                Some(canonical) => canonical.clone(),
                None => cur.clone(),
            };
            let next = strip_noise(&collapse_elongation(&mapped));
            if next == cur {
                return next;
            }
            cur = next;
        }
        cur
    }
}

/// Collapses runs of three or more identical characters down to one.
fn collapse_elongation(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut run_char: Option<char> = None;
    let mut run_len = 0usize;
    let flush = |c: Option<char>, len: usize, out: &mut String| {
        if let Some(c) = c {
            let keep = if len >= 3 { 1 } else { len };
            for _ in 0..keep {
                out.push(c);
            }
        }
    };
    for c in s.chars() {
        if Some(c) == run_char {
            run_len += 1;
        } else {
            flush(run_char, run_len, &mut out);
            run_char = Some(c);
            run_len = 1;
        }
    }
    flush(run_char, run_len, &mut out);
    out
}

/// True for characters normalization deletes: any numeric digit, ASCII
/// punctuation, common Persian/Arabic punctuation, typographic quotes and
/// dashes, the tatweel filler, and zero-width (non-)joiners.
fn is_noise_char(c: char) -> bool {
    c.is_numeric()
        || c.is_ascii_punctuation()
        || matches!(
            c,
            '،' | '؛'
                | '؟'
                | '«'
                | '»'
                | '…'
                | '—'
                | '–'
                | '“'
                | '”'
                | '‘'
                | '’'
                | '·'
                | 'ـ'
                | '٪'
                | '٬'
                | '٫'
                | '؍'
                | '\u{200c}'
                | '\u{200d}'
        )
}

fn strip_noise(s: &str) -> String {
    s.chars().filter(|&c| !is_noise_char(c)).collect()
}

/// Splits raw text into tokens on whitespace, additionally cutting emoticon
/// sequences out as their own tokens even when glued to a word.
///
/// Joining the result with single spaces and re-tokenizing reproduces the
/// same token list.
pub fn tokenize(text: &str, emoji: &EmojiTable) -> Vec<String> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().expect("char at boundary");
        if c.is_whitespace() {
            if !buf.is_empty() {
                out.push(std::mem::take(&mut buf));
            }
            i += c.len_utf8();
            continue;
        }
        if let Some((len, _)) = emoji.longest_prefix(rest) {
            if !buf.is_empty() {
                out.push(std::mem::take(&mut buf));
            }
            out.push(rest[..len].to_string());
            i += len;
            continue;
        }
        buf.push(c);
        i += c.len_utf8();
    }
    if !buf.is_empty() {
        out.push(buf);
    }
    out
}

/// Removes emoticon tokens from a token stream, reporting each occurrence as
/// `(original 1-based position, class)` in surface order.
pub fn extract_emojis(
    tokens: &[String],
    emoji: &EmojiTable,
) -> (Vec<String>, Vec<(usize, EmojiClass)>) {
    let mut kept = Vec::with_capacity(tokens.len());
    let mut found = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        match emoji.classify(tok) {
            Some(class) => found.push((i + 1, class)),
            None => kept.push(tok.clone()),
        }
    }
    (kept, found)
}

/// Reads dependency-parsed sentences from a file in the five-column
/// tab-separated block format (`ID FORM POS HEAD DEPREL`, blank line between
/// sentences). See [`parse_conll`].
pub fn load_conll(
    path: &Path,
    normalizer: &Normalizer,
    emoji: &EmojiTable,
) -> Result<Vec<DepSentence>, IngestError> {
    let content = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_conll(&content, normalizer, emoji)
}

/// Parses dependency-parsed sentences from text.
///
/// Each non-blank line is one token: `ID FORM POS HEAD DEPREL`, tab-separated,
/// with 1-based sequential IDs and `HEAD` 0 for the root. A blank line
/// terminates the sentence. Every block must form a valid single-rooted tree.
/// `FORM` is kept as the token surface and also normalized; forms matching the
/// emoticon table are recorded in the sentence's emoji list (their normalized
/// form strips to empty, so they carry no strength).
pub fn parse_conll(
    content: &str,
    normalizer: &Normalizer,
    emoji: &EmojiTable,
) -> Result<Vec<DepSentence>, IngestError> {
    struct Row {
        line: usize,
        id: usize,
        form: String,
        pos: String,
        head: usize,
        deprel: String,
    }

    let mut sentences = Vec::new();
    let mut block: Vec<Row> = Vec::new();

    let finish = |block: &mut Vec<Row>, sentences: &mut Vec<DepSentence>| -> Result<(), IngestError> {
        if block.is_empty() {
            return Ok(());
        }
        let ordinal = sentences.len() + 1;
        let mut tokens = Vec::with_capacity(block.len());
        let mut arcs = Vec::with_capacity(block.len());
        let mut emojis = Vec::new();
        for (i, row) in block.iter().enumerate() {
            if row.id != i + 1 {
                return Err(IngestError::Format {
                    line: row.line,
                    reason: format!("token id {} out of order (expected {})", row.id, i + 1),
                });
            }
            if let Some(class) = emoji.classify(&row.form) {
                emojis.push((row.id, class));
            }
            let normalized = normalizer.normalize(&row.form);
            tokens.push(Token::new(row.id, row.form.clone(), normalized, row.pos.clone()));
            arcs.push(DepArc::new(row.id, row.head, row.deprel.clone()));
        }
        block.clear();
        let sentence = DepSentence::new(tokens, arcs, emojis).map_err(|source| {
            IngestError::Tree {
                sentence: ordinal,
                source,
            }
        })?;
        sentences.push(sentence);
        Ok(())
    };

    for (i, raw) in content.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut block, &mut sentences)?;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(IngestError::Format {
                line: lineno,
                reason: format!("expected 5 tab-separated fields, found {}", fields.len()),
            });
        }
        let id: usize = fields[0].parse().map_err(|_| IngestError::Format {
            line: lineno,
            reason: format!("non-numeric token id {:?}", fields[0]),
        })?;
        let head: usize = fields[3].parse().map_err(|_| IngestError::Format {
            line: lineno,
            reason: format!("non-numeric head index {:?}", fields[3]),
        })?;
        block.push(Row {
            line: lineno,
            id,
            form: fields[1].to_string(),
            pos: fields[2].to_string(),
            head,
            deprel: fields[4].to_string(),
        });
    }
    finish(&mut block, &mut sentences)?;
    Ok(sentences)
}

/// Reads a labelled corpus from a file. See [`parse_corpus`].
pub fn load_corpus(path: &Path) -> Result<RawCorpus, IngestError> {
    let content = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&content)
}

/// Parses a labelled corpus: one record per non-blank line in the form
/// `label<TAB>text` with label `pos` or `neg`. Blank lines are skipped;
/// anything else is an error carrying its line number.
pub fn parse_corpus(content: &str) -> Result<RawCorpus, IngestError> {
    let mut records = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| IngestError::Format {
            line: lineno,
            reason: "expected label<TAB>text".to_string(),
        })?;
        let label = match label {
            "pos" => Label::Pos,
            "neg" => Label::Neg,
            other => {
                return Err(IngestError::Label {
                    line: lineno,
                    found: other.to_string(),
                })
            }
        };
        records.push((label, text.to_string()));
    }
    Ok(RawCorpus { records })
}
