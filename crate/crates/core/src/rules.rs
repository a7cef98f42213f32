//! Grammar-aware polarity rules over dependency trees.
//!
//! Classification proceeds in three stages:
//!
//! 1. **Segment selection.** Clause-splitting rules (adversative, adverbial
//!    clause, complement clause, adjective clause, demonstrative) repeatedly
//!    narrow the sentence to the clause that carries the overall verdict.
//!    At each round the splitters are tried in a fixed precedence order and
//!    the first one that fires wins; the process recurses inside the chosen
//!    segment until no splitter fires.
//! 2. **Strength transforms.** Inside the final segment, token strengths are
//!    rewritten on a working copy: negation flips the words governed by the
//!    negating token, the against-preposition inverts or nudges the phrase it
//!    introduces, positive prepositions and negative prefixes force the
//!    adjacent adjective's sign, and noun–adjective pairs are collapsed onto
//!    the adjective.
//! 3. **Aggregation.** The transformed strengths inside the segment are
//!    summed; a positive sum is a positive verdict, a negative sum a negative
//!    one. An exactly zero sum consults the emoticons attached to the
//!    sentence, and only if those are absent too does the engine give up and
//!    return [`Polarity::Unclassified`].
//!
//! Every decision is recorded as a [`TraceStep`], so an outcome can be
//! replayed or displayed step by step.
//!
//! All rule parameters (trigger words, marker sequences, part-of-speech and
//! relation tag sets, the per-rule enable mask) live in [`RuleConfig`] and can
//! be loaded from a plain-text config file.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::sentence::{DepSentence, EmojiClass, Polarity, Token};

/// The ten rules, in canonical declaration order.
///
/// The order is stable and doubles as the tie-break order wherever rules are
/// ranked (for example in ablation reports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    PolarityInversion,
    ComplementClause,
    Adversative,
    AdverbialClause,
    AdjectiveClause,
    JointNounAdjective,
    Preposition,
    Demonstrative,
    PrepositionSubrule,
    EmojiSubrule,
}

impl RuleKind {
    /// Number of rules.
    pub const COUNT: usize = 10;

    /// All rules in canonical order.
    pub const ALL: [RuleKind; RuleKind::COUNT] = [
        RuleKind::PolarityInversion,
        RuleKind::ComplementClause,
        RuleKind::Adversative,
        RuleKind::AdverbialClause,
        RuleKind::AdjectiveClause,
        RuleKind::JointNounAdjective,
        RuleKind::Preposition,
        RuleKind::Demonstrative,
        RuleKind::PrepositionSubrule,
        RuleKind::EmojiSubrule,
    ];

    /// Position in [`RuleKind::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Stable machine-readable identifier, used in config files and CLI
    /// arguments.
    pub fn id(self) -> &'static str {
        match self {
            RuleKind::PolarityInversion => "polarity-inversion",
            RuleKind::ComplementClause => "complement-clause",
            RuleKind::Adversative => "adversative",
            RuleKind::AdverbialClause => "adverbial-clause",
            RuleKind::AdjectiveClause => "adjective-clause",
            RuleKind::JointNounAdjective => "joint-noun-adjective",
            RuleKind::Preposition => "preposition",
            RuleKind::Demonstrative => "demonstrative",
            RuleKind::PrepositionSubrule => "preposition-subrule",
            RuleKind::EmojiSubrule => "emoji-subrule",
        }
    }

    /// Human-readable name, used in reports.
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::PolarityInversion => "Polarity Inversion",
            RuleKind::ComplementClause => "Complement Clause",
            RuleKind::Adversative => "Adversative",
            RuleKind::AdverbialClause => "Adverbial Clause",
            RuleKind::AdjectiveClause => "Adjective Clause",
            RuleKind::JointNounAdjective => "Joint Noun and Adjective",
            RuleKind::Preposition => "Preposition",
            RuleKind::Demonstrative => "Demonstrative",
            RuleKind::PrepositionSubrule => "Preposition Sub-rule",
            RuleKind::EmojiSubrule => "Emoji Sub-rule",
        }
    }

    /// Parses a machine-readable identifier produced by [`RuleKind::id`].
    pub fn from_id(id: &str) -> Option<RuleKind> {
        RuleKind::ALL.iter().copied().find(|k| k.id() == id)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-rule enable mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleMask([bool; RuleKind::COUNT]);

impl RuleMask {
    /// Every rule enabled.
    pub const fn all() -> Self {
        RuleMask([true; RuleKind::COUNT])
    }

    /// Every rule disabled.
    pub const fn none() -> Self {
        RuleMask([false; RuleKind::COUNT])
    }

    /// Only `kind` enabled.
    pub fn only(kind: RuleKind) -> Self {
        let mut mask = RuleMask::none();
        mask.set(kind, true);
        mask
    }

    /// Every rule except `kind` enabled.
    pub fn without(kind: RuleKind) -> Self {
        let mut mask = RuleMask::all();
        mask.set(kind, false);
        mask
    }

    pub fn enabled(&self, kind: RuleKind) -> bool {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: RuleKind, on: bool) {
        self.0[kind.index()] = on;
    }
}

impl Default for RuleMask {
    fn default() -> Self {
        RuleMask::all()
    }
}

/// A contiguous token range, 1-based and inclusive at both ends.
///
/// `end < start` denotes the empty segment (only produced for empty
/// sentences); [`Segment::new`] rejects it, [`Segment::full`] may return it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    /// Builds a non-empty segment. Panics if `start` is zero or `end < start`.
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start >= 1, "segments are 1-based");
        assert!(end >= start, "segment end before start");
        Segment { start, end }
    }

    /// The segment covering the whole sentence.
    pub fn full(sentence: &DepSentence) -> Self {
        Segment {
            start: 1,
            end: sentence.len(),
        }
    }

    pub fn len(&self) -> usize {
        if self.end < self.start {
            0
        } else {
            self.end - self.start + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    /// Whether 1-based position `index` lies inside the segment.
    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index <= self.end
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.start, self.end)
    }
}

/// Failures while loading a rule config file.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to read rule config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("rule config line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Trigger words, tag sets and switches steering the rule engine.
///
/// Word lists are matched against the *normalized* token form, exactly and
/// case-sensitively. Marker entries may contain spaces; each space-separated
/// part must then match one consecutive token.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleConfig {
    /// Words that negate their governed phrase (exact forms).
    pub negation_words: Vec<String>,
    /// Contrast conjunctions ("but", "although", …); the clause after the
    /// marker wins.
    pub adversative_markers: Vec<String>,
    /// The complementizer introducing a complement clause.
    pub complement_marker: String,
    /// Marker sequences opening an adjective clause ("that this …"); the
    /// clause after the marker wins.
    pub adjective_clause_markers: Vec<String>,
    /// Marker sequences opening a conditional/adverbial clause ("in case
    /// that …"); the clause after the marker wins.
    pub whereas_markers: Vec<String>,
    /// The "against" preposition that inverts the phrase it introduces.
    pub against_words: Vec<String>,
    /// Prepositions that force the following adjective positive.
    pub positive_prepositions: Vec<String>,
    /// Morphemes that force the adjective they precede (as a free token) or
    /// open (as a fused prefix) negative.
    pub negative_prefixes: Vec<String>,
    /// Demonstratives that close off a statement ("this"); the text before
    /// them wins.
    pub demonstratives: Vec<String>,
    /// Relation tags identifying a clause subject.
    pub subject_relations: Vec<String>,
    /// Relation tags along which a noun–adjective pair is collapsed.
    pub noun_adjective_relations: Vec<String>,
    /// Part-of-speech tags counted as nouns.
    pub noun_pos: Vec<String>,
    /// Part-of-speech tags counted as adjectives.
    pub adjective_pos: Vec<String>,
    /// Part-of-speech tags counted as verbs.
    pub verb_pos: Vec<String>,
    /// Sentences longer than this many tokens are not classified by the
    /// rules (long sentences are better served by the fallback classifier).
    pub max_sentence_len: usize,
    /// When a neutral sentence carries several emoticons, take the last one
    /// (`true`) or the first one (`false`).
    pub emoji_last_wins: bool,
    /// Per-rule enable mask.
    pub enabled: RuleMask,
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            negation_words: strings(&[
                "نبود",
                "نیست",
                "نه",
                "نمی",
                "نباید",
                "نشد",
                "ندارم",
                "نداری",
                "ندارد",
                "نداره",
                "نداریم",
                "ندارید",
                "ندارند",
                "نخریدی",
                "نداشته",
                "نکرد",
            ]),
            adversative_markers: strings(&["اما", "ولی", "اگر چه", "با اینکه"]),
            complement_marker: "که".to_string(),
            adjective_clause_markers: strings(&["که این"]),
            whereas_markers: strings(&["در صورتی که"]),
            against_words: strings(&["مخالف"]),
            positive_prepositions: strings(&["با", "خوش", "صفای"]),
            negative_prefixes: strings(&["بی", "ضد", "نا", "زهر", "لا"]),
            demonstratives: strings(&["این"]),
            subject_relations: strings(&["SBJ"]),
            noun_adjective_relations: strings(&["SBJ", "MOS", "NPOSTMOD", "ADJ"]),
            noun_pos: strings(&["N", "NOUN", "Ne"]),
            adjective_pos: strings(&["ADJ", "AJ", "AJe"]),
            verb_pos: strings(&["V", "VERB"]),
            max_sentence_len: 100,
            emoji_last_wins: true,
            enabled: RuleMask::all(),
        }
    }
}

impl RuleConfig {
    /// Reads a config file; see [`RuleConfig::parse`] for the format.
    pub fn load(path: impl AsRef<Path>) -> Result<RuleConfig, ConfigError> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RuleConfig::parse(&content)
    }

    /// Parses `key = value, value` lines over the defaults.
    ///
    /// Blank lines and lines starting with `#` are skipped. Values are
    /// comma-separated and replace the default list for their key wholesale.
    /// A value may contain spaces (multi-token marker sequences). Special
    /// keys: `max_sentence_len` takes one integer, `emoji_priority` takes
    /// `last` or `first`, and `disabled_rules` takes rule identifiers such as
    /// `polarity-inversion`. Unknown keys or rule identifiers are errors.
    pub fn parse(content: &str) -> Result<RuleConfig, ConfigError> {
        let mut cfg = RuleConfig::default();
        for (idx, raw) in content.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                reason: "expected `key = value`".to_string(),
            })?;
            let key = key.trim();
            let values: Vec<String> = value
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            let single = |values: &[String]| -> Result<String, ConfigError> {
                if values.len() == 1 {
                    Ok(values[0].clone())
                } else {
                    Err(ConfigError::Parse {
                        line,
                        reason: format!("key `{key}` expects exactly one value"),
                    })
                }
            };
            match key {
                "negation_words" => cfg.negation_words = values,
                "adversative_markers" => cfg.adversative_markers = values,
                "complement_marker" => cfg.complement_marker = single(&values)?,
                "adjective_clause_markers" => cfg.adjective_clause_markers = values,
                "whereas_markers" => cfg.whereas_markers = values,
                "against_words" => cfg.against_words = values,
                "positive_prepositions" => cfg.positive_prepositions = values,
                "negative_prefixes" => cfg.negative_prefixes = values,
                "demonstratives" => cfg.demonstratives = values,
                "subject_relations" => cfg.subject_relations = values,
                "noun_adjective_relations" => cfg.noun_adjective_relations = values,
                "noun_pos" => cfg.noun_pos = values,
                "adjective_pos" => cfg.adjective_pos = values,
                "verb_pos" => cfg.verb_pos = values,
                "max_sentence_len" => {
                    cfg.max_sentence_len =
                        single(&values)?
                            .parse()
                            .map_err(|_| ConfigError::Parse {
                                line,
                                reason: "max_sentence_len expects an integer".to_string(),
                            })?;
                }
                "emoji_priority" => {
                    cfg.emoji_last_wins = match single(&values)?.as_str() {
                        "last" => true,
                        "first" => false,
                        other => {
                            return Err(ConfigError::Parse {
                                line,
                                reason: format!(
                                    "emoji_priority expects `last` or `first`, got `{other}`"
                                ),
                            })
                        }
                    };
                }
                "disabled_rules" => {
                    let mut mask = RuleMask::all();
                    for id in &values {
                        let kind = RuleKind::from_id(id).ok_or_else(|| ConfigError::Parse {
                            line,
                            reason: format!("unknown rule id `{id}`"),
                        })?;
                        mask.set(kind, false);
                    }
                    cfg.enabled = mask;
                }
                other => {
                    return Err(ConfigError::Parse {
                        line,
                        reason: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        Ok(cfg)
    }
}

/// One recorded step of a rule-engine run.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceStep {
    /// A clause splitter narrowed the sentence to `selected`.
    Split { rule: RuleKind, selected: Segment },
    /// A strength transform rewrote the listed 1-based positions.
    Transform {
        rule: RuleKind,
        positions: Vec<usize>,
    },
    /// Strengths inside `segment` were summed.
    Aggregate { segment: Segment, sum: f64 },
    /// A zero aggregate was decided by an emoticon of the given class.
    EmojiDecision { class: EmojiClass },
    /// The sentence exceeded the length cap and was not classified.
    LengthCap { len: usize, cap: usize },
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStep::Split { rule, selected } => {
                write!(f, "split {rule}: kept {selected}")
            }
            TraceStep::Transform { rule, positions } => {
                write!(f, "transform {rule}: touched {positions:?}")
            }
            TraceStep::Aggregate { segment, sum } => {
                write!(f, "aggregate {segment}: sum {sum}")
            }
            TraceStep::EmojiDecision { class } => {
                write!(f, "emoji decision: {class}")
            }
            TraceStep::LengthCap { len, cap } => {
                write!(f, "length cap: {len} tokens exceeds {cap}")
            }
        }
    }
}

/// Verdict of the rule engine together with the steps that produced it.
///
/// The trace is never empty: even an unclassified outcome records either the
/// aggregation that came out zero or the length cap that stopped the run.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutcome {
    pub polarity: Polarity,
    pub trace: Vec<TraceStep>,
}

impl RuleOutcome {
    /// Re-derives the polarity from the trace alone.
    ///
    /// Walking the recorded steps must land on the same verdict the engine
    /// returned; this is the consistency check behind the `trace`
    /// subcommand.
    pub fn replay(&self) -> Polarity {
        let mut result = Polarity::Unclassified;
        for step in &self.trace {
            match step {
                TraceStep::Aggregate { sum, .. } => {
                    result = if *sum > 0.0 {
                        Polarity::Positive
                    } else if *sum < 0.0 {
                        Polarity::Negative
                    } else {
                        Polarity::Unclassified
                    };
                }
                TraceStep::EmojiDecision { class } => {
                    result = match class {
                        EmojiClass::Positive => Polarity::Positive,
                        EmojiClass::Negative => Polarity::Negative,
                    };
                }
                TraceStep::LengthCap { .. } => result = Polarity::Unclassified,
                TraceStep::Split { .. } | TraceStep::Transform { .. } => {}
            }
        }
        result
    }
}

fn contains(list: &[String], item: &str) -> bool {
    list.iter().any(|x| x == item)
}

fn is_noun(cfg: &RuleConfig, token: &Token) -> bool {
    contains(&cfg.noun_pos, &token.pos)
}

fn is_adjective(cfg: &RuleConfig, token: &Token) -> bool {
    contains(&cfg.adjective_pos, &token.pos)
}

fn is_verb(cfg: &RuleConfig, token: &Token) -> bool {
    contains(&cfg.verb_pos, &token.pos)
}

fn is_negation(cfg: &RuleConfig, token: &Token) -> bool {
    contains(&cfg.negation_words, &token.normalized)
}

/// Largest absolute token strength in the sentence, or `1.0` when every
/// token is neutral.
///
/// Fixed adjustments (the against-preposition nudge, the forced strength of
/// a prefixed adjective) are expressed in this unit, which keeps the engine's
/// verdict invariant under a uniform rescaling of the lexicon.
pub fn unit_strength(sentence: &DepSentence) -> f64 {
    let max = sentence
        .tokens()
        .iter()
        .map(|t| t.strength.abs())
        .fold(0.0, f64::max);
    if max == 0.0 {
        1.0
    } else {
        max
    }
}

/// Matches a space-separated marker sequence at 1-based position `at`,
/// entirely inside `seg`, and returns the position of its last token.
fn seq_match_at(sentence: &DepSentence, seg: Segment, at: usize, marker: &str) -> Option<usize> {
    let mut pos = at;
    let mut matched = false;
    for part in marker.split_whitespace() {
        if !seg.contains(pos) || sentence.token(pos).normalized != part {
            return None;
        }
        pos += 1;
        matched = true;
    }
    matched.then(|| pos - 1)
}

/// Longest marker match at `at`, if any.
fn longest_seq_match(
    sentence: &DepSentence,
    seg: Segment,
    at: usize,
    markers: &[String],
) -> Option<usize> {
    markers
        .iter()
        .filter_map(|m| seq_match_at(sentence, seg, at, m))
        .max()
}

/// Adversative split: at the first contrast marker that is neither
/// segment-initial nor segment-final, keep the clause after the marker.
pub fn rule_adversative(
    sentence: &DepSentence,
    seg: Segment,
    cfg: &RuleConfig,
) -> Option<Segment> {
    for i in seg.start..=seg.end {
        if let Some(j) = longest_seq_match(sentence, seg, i, &cfg.adversative_markers) {
            if i > seg.start && j < seg.end {
                return Some(Segment::new(j + 1, seg.end));
            }
        }
    }
    None
}

/// Adverbial-clause split: at the first conditional marker followed by a
/// clause that has both a subject relation and a verb, keep that clause.
pub fn rule_adverbial(sentence: &DepSentence, seg: Segment, cfg: &RuleConfig) -> Option<Segment> {
    for i in seg.start..=seg.end {
        let Some(j) = longest_seq_match(sentence, seg, i, &cfg.whereas_markers) else {
            continue;
        };
        if j >= seg.end {
            continue;
        }
        let suffix = j + 1..=seg.end;
        let has_subject = suffix
            .clone()
            .any(|q| match sentence.head_of(q) {
                Some(_) => sentence
                    .arcs()
                    .iter()
                    .any(|a| a.dependent == q && contains(&cfg.subject_relations, &a.relation)),
                None => false,
            });
        let has_verb = suffix.clone().any(|q| is_verb(cfg, sentence.token(q)));
        if has_subject && has_verb {
            return Some(Segment::new(j + 1, seg.end));
        }
    }
    None
}

/// Complement-clause split: at the first non-initial complementizer whose
/// head is a content word (noun, verb or adjective), keep the main clause
/// before it.
///
/// A complementizer that opens an adjective-clause marker sequence is left
/// for the adjective-clause rule whenever that rule is enabled.
pub fn rule_complement(sentence: &DepSentence, seg: Segment, cfg: &RuleConfig) -> Option<Segment> {
    for p in seg.start..=seg.end {
        if sentence.token(p).normalized != cfg.complement_marker {
            continue;
        }
        if p <= seg.start {
            continue;
        }
        if cfg.enabled.enabled(RuleKind::AdjectiveClause)
            && longest_seq_match(sentence, seg, p, &cfg.adjective_clause_markers).is_some()
        {
            continue;
        }
        let Some(h) = sentence.head_of(p) else {
            continue;
        };
        if h == 0 {
            continue;
        }
        let head = sentence.token(h);
        if is_noun(cfg, head) || is_verb(cfg, head) || is_adjective(cfg, head) {
            return Some(Segment::new(seg.start, p - 1));
        }
    }
    None
}

/// Adjective-clause split: at the first adjective-clause marker sequence not
/// ending at the segment boundary, keep the clause after it.
pub fn rule_adjective_clause(
    sentence: &DepSentence,
    seg: Segment,
    cfg: &RuleConfig,
) -> Option<Segment> {
    for i in seg.start..=seg.end {
        if let Some(p) = longest_seq_match(sentence, seg, i, &cfg.adjective_clause_markers) {
            if p < seg.end {
                return Some(Segment::new(p + 1, seg.end));
            }
        }
    }
    None
}

/// Demonstrative split: at the first demonstrative that has at least two
/// tokens before it and at least one after it, keep the text before it.
pub fn rule_demonstrative(
    sentence: &DepSentence,
    seg: Segment,
    cfg: &RuleConfig,
) -> Option<Segment> {
    for p in seg.start..=seg.end {
        if !contains(&cfg.demonstratives, &sentence.token(p).normalized) {
            continue;
        }
        if p >= seg.start + 2 && p < seg.end {
            return Some(Segment::new(seg.start, p - 1));
        }
    }
    None
}

/// Scope of one negation token: the tokens whose strengths it flips.
///
/// When the negator's head lies inside the segment the scope is that head
/// plus the head's other dependents in the segment (the negated predicate and
/// its arguments); when the negator is the root or its head lies outside, the
/// scope is the negator's own dependents in the segment. Tokens that are
/// themselves negation words are excluded, so a double negation cancels
/// exactly.
fn inversion_scope(
    sentence: &DepSentence,
    seg: Segment,
    p: usize,
    cfg: &RuleConfig,
) -> Vec<usize> {
    let head = sentence.head_of(p).unwrap_or(0);
    let mut scope: Vec<usize> = if head != 0 && seg.contains(head) {
        let mut v = vec![head];
        for q in seg.start..=seg.end {
            if q != p && q != head && sentence.head_of(q) == Some(head) {
                v.push(q);
            }
        }
        v
    } else {
        (seg.start..=seg.end)
            .filter(|&q| sentence.head_of(q) == Some(p))
            .collect()
    };
    scope.retain(|&q| !is_negation(cfg, sentence.token(q)));
    scope.sort_unstable();
    scope
}

/// Polarity inversion: every negation word flips the strengths in its scope.
///
/// Scopes depend only on the tree shape, so applying this transform twice is
/// the identity. Returns the flipped positions in application order.
pub fn rule_polarity_inversion(
    sentence: &DepSentence,
    seg: Segment,
    strengths: &mut [f64],
    cfg: &RuleConfig,
) -> Vec<usize> {
    let mut touched = Vec::new();
    for p in seg.start..=seg.end {
        if !is_negation(cfg, sentence.token(p)) {
            continue;
        }
        for q in inversion_scope(sentence, seg, p, cfg) {
            strengths[q - 1] = -strengths[q - 1];
            touched.push(q);
        }
    }
    touched
}

/// Against-preposition: the phrase after an against-word is inverted; when
/// that phrase is neutral (or missing) the against-word itself contributes a
/// small negative nudge instead.
pub fn rule_preposition(
    sentence: &DepSentence,
    seg: Segment,
    strengths: &mut [f64],
    cfg: &RuleConfig,
) -> Vec<usize> {
    let unit = unit_strength(sentence);
    let mut touched = Vec::new();
    for p in seg.start..=seg.end {
        if !contains(&cfg.against_words, &sentence.token(p).normalized) {
            continue;
        }
        let span = p + 1..=seg.end;
        let span_sum: f64 = span.clone().map(|q| strengths[q - 1]).sum();
        if span_sum != 0.0 {
            for q in span {
                strengths[q - 1] = -strengths[q - 1];
                touched.push(q);
            }
        } else {
            strengths[p - 1] += -0.1 * unit;
            touched.push(p);
        }
    }
    touched
}

/// Prepositional and morphological forcing of adjectives.
///
/// A positive preposition immediately before an adjective forces that
/// adjective positive; a negative prefix morpheme — either as a free token
/// before an adjective or fused onto the adjective itself — forces it
/// negative. Forcing keeps the adjective's current magnitude, or uses half
/// the sentence unit strength when the adjective is neutral.
pub fn rule_preposition_subrule(
    sentence: &DepSentence,
    seg: Segment,
    strengths: &mut [f64],
    cfg: &RuleConfig,
) -> Vec<usize> {
    let unit = unit_strength(sentence);
    let mut touched = Vec::new();
    for p in seg.start..=seg.end {
        let token = sentence.token(p);
        let next_is_adjective = p + 1 <= seg.end && is_adjective(cfg, sentence.token(p + 1));
        if next_is_adjective && contains(&cfg.positive_prepositions, &token.normalized) {
            let cur = strengths[p]; // slot of position p + 1
            strengths[p] = if cur != 0.0 { cur.abs() } else { 0.5 * unit };
            touched.push(p + 1);
        }
        if next_is_adjective && contains(&cfg.negative_prefixes, &token.normalized) {
            let cur = strengths[p];
            strengths[p] = if cur != 0.0 { -cur.abs() } else { -0.5 * unit };
            touched.push(p + 1);
        }
        if is_adjective(cfg, token)
            && cfg
                .negative_prefixes
                .iter()
                .any(|pre| token.normalized.starts_with(pre.as_str()) && token.normalized.len() > pre.len())
        {
            let cur = strengths[p - 1];
            strengths[p - 1] = if cur != 0.0 { -cur.abs() } else { -0.5 * unit };
            touched.push(p);
        }
    }
    touched
}

/// Joint noun–adjective: along qualifying relations, a noun linked to an
/// adjective is silenced so the pair contributes the adjective's strength
/// exactly once.
pub fn rule_joint_noun_adjective(
    sentence: &DepSentence,
    seg: Segment,
    strengths: &mut [f64],
    cfg: &RuleConfig,
) -> Vec<usize> {
    let mut touched = Vec::new();
    for arc in sentence.arcs() {
        if arc.head == 0
            || !contains(&cfg.noun_adjective_relations, &arc.relation)
            || !seg.contains(arc.dependent)
            || !seg.contains(arc.head)
        {
            continue;
        }
        let dep = sentence.token(arc.dependent);
        let head = sentence.token(arc.head);
        if is_noun(cfg, dep) && is_adjective(cfg, head) {
            strengths[arc.dependent - 1] = 0.0;
            touched.push(arc.dependent);
        } else if is_adjective(cfg, dep) && is_noun(cfg, head) {
            strengths[arc.head - 1] = 0.0;
            touched.push(arc.head);
        }
    }
    touched
}

/// Emoticon tie-break: the polarity of the sentence's deciding emoticon, if
/// it has any.
pub fn rule_emoji(sentence: &DepSentence, cfg: &RuleConfig) -> Option<Polarity> {
    let pick = if cfg.emoji_last_wins {
        sentence.emojis().last()
    } else {
        sentence.emojis().first()
    }?;
    Some(match pick.1 {
        EmojiClass::Positive => Polarity::Positive,
        EmojiClass::Negative => Polarity::Negative,
    })
}

/// Signs a list of strength contributions: positive sum, negative sum, or
/// `None` for an exact zero (no signal).
pub fn aggregate(contributions: &[f64]) -> Option<Polarity> {
    let sum: f64 = contributions.iter().sum();
    if sum > 0.0 {
        Some(Polarity::Positive)
    } else if sum < 0.0 {
        Some(Polarity::Negative)
    } else {
        None
    }
}

type SplitFn = fn(&DepSentence, Segment, &RuleConfig) -> Option<Segment>;
type TransformFn = fn(&DepSentence, Segment, &mut [f64], &RuleConfig) -> Vec<usize>;

/// Clause splitters in precedence order.
const SPLITTERS: [(RuleKind, SplitFn); 5] = [
    (RuleKind::Adversative, rule_adversative),
    (RuleKind::AdverbialClause, rule_adverbial),
    (RuleKind::ComplementClause, rule_complement),
    (RuleKind::AdjectiveClause, rule_adjective_clause),
    (RuleKind::Demonstrative, rule_demonstrative),
];

/// Strength transforms in application order.
const TRANSFORMS: [(RuleKind, TransformFn); 4] = [
    (RuleKind::PolarityInversion, rule_polarity_inversion),
    (RuleKind::Preposition, rule_preposition),
    (RuleKind::PrepositionSubrule, rule_preposition_subrule),
    (RuleKind::JointNounAdjective, rule_joint_noun_adjective),
];

fn first_split(sentence: &DepSentence, seg: Segment, cfg: &RuleConfig) -> Option<(RuleKind, Segment)> {
    for (kind, rule) in SPLITTERS {
        if cfg.enabled.enabled(kind) {
            if let Some(sub) = rule(sentence, seg, cfg) {
                return Some((kind, sub));
            }
        }
    }
    None
}

/// Runs the rule engine on one segment of a sentence.
///
/// This is [`classify_rules`] without the sentence-length gate: splitters
/// recurse inside `seg`, transforms rewrite a working copy of the token
/// strengths, and the segment sum decides the verdict. The unit strength and
/// the emoticon tie-break always refer to the whole sentence.
pub fn classify_rules_in(sentence: &DepSentence, seg: Segment, cfg: &RuleConfig) -> RuleOutcome {
    let mut trace = Vec::new();
    let mut seg = seg;
    while let Some((kind, sub)) = first_split(sentence, seg, cfg) {
        trace.push(TraceStep::Split {
            rule: kind,
            selected: sub,
        });
        seg = sub;
    }
    let mut strengths: Vec<f64> = sentence.tokens().iter().map(|t| t.strength).collect();
    for (kind, rule) in TRANSFORMS {
        if !cfg.enabled.enabled(kind) {
            continue;
        }
        let touched = rule(sentence, seg, &mut strengths, cfg);
        if !touched.is_empty() {
            trace.push(TraceStep::Transform {
                rule: kind,
                positions: touched,
            });
        }
    }
    let contributions: Vec<f64> = (seg.start..=seg.end).map(|q| strengths[q - 1]).collect();
    let sum: f64 = contributions.iter().sum();
    trace.push(TraceStep::Aggregate { segment: seg, sum });
    let polarity = match aggregate(&contributions) {
        Some(p) => p,
        None => {
            let emoji = if cfg.enabled.enabled(RuleKind::EmojiSubrule) {
                rule_emoji(sentence, cfg)
            } else {
                None
            };
            match emoji {
                Some(p) => {
                    trace.push(TraceStep::EmojiDecision {
                        class: match p {
                            Polarity::Positive => EmojiClass::Positive,
                            _ => EmojiClass::Negative,
                        },
                    });
                    p
                }
                None => Polarity::Unclassified,
            }
        }
    };
    RuleOutcome { polarity, trace }
}

/// Classifies a dependency-parsed sentence with the rule engine.
///
/// Sentences longer than [`RuleConfig::max_sentence_len`] are not analysed:
/// the outcome is `Unclassified` with a [`TraceStep::LengthCap`] record, so
/// the hybrid pipeline can route them to the fallback classifier.
pub fn classify_rules(sentence: &DepSentence, cfg: &RuleConfig) -> RuleOutcome {
    if sentence.len() > cfg.max_sentence_len {
        return RuleOutcome {
            polarity: Polarity::Unclassified,
            trace: vec![TraceStep::LengthCap {
                len: sentence.len(),
                cap: cfg.max_sentence_len,
            }],
        };
    }
    classify_rules_in(sentence, Segment::full(sentence), cfg)
}
