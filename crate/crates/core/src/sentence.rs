//! Core data model: tokens, dependency arcs, sentences and polarity labels.
//!
//! A [`DepSentence`] is a dependency-parsed sentence: a list of [`Token`]s in
//! surface order, one [`DepArc`] per token pointing at its head (`0` denotes
//! the artificial root), and a list of emoticon occurrences kept outside the
//! token list so that text normalization cannot destroy them.

use std::fmt;

/// Sentiment label attached to a sentence by the rule engine or the fallback
/// classifier.
///
/// `Unclassified` means the rule engine found no signal (zero aggregate and no
/// emoticon). The hybrid pipeline never returns it: such sentences are routed
/// to the fallback classifier instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Unclassified,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// Class of an emoticon occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmojiClass {
    Positive,
    Negative,
}

impl fmt::Display for EmojiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmojiClass::Positive => f.write_str("positive-emoji"),
            EmojiClass::Negative => f.write_str("negative-emoji"),
        }
    }
}

/// One token of a parsed sentence.
///
/// `index` is the 1-based surface position, `surface` the raw form, and
/// `normalized` the cleaned form used for lexicon lookup and trigger-word
/// matching. `strength` is the lexicon sentiment strength in `[-1.0, +1.0]`
/// (`0.0` for out-of-vocabulary words).
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub normalized: String,
    pub pos: String,
    pub strength: f64,
}

impl Token {
    /// Builds a token with zero strength.
    pub fn new(
        index: usize,
        surface: impl Into<String>,
        normalized: impl Into<String>,
        pos: impl Into<String>,
    ) -> Self {
        Token {
            index,
            surface: surface.into(),
            normalized: normalized.into(),
            pos: pos.into(),
            strength: 0.0,
        }
    }

    /// Returns a copy of the token with `strength` set, clamped to `[-1, 1]`.
    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = strength.clamp(-1.0, 1.0);
        self
    }
}

/// One dependency arc: `dependent` (1-based token index) attaches to `head`
/// (1-based token index, or `0` for the artificial root) under `relation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepArc {
    pub dependent: usize,
    pub head: usize,
    pub relation: String,
}

impl DepArc {
    pub fn new(dependent: usize, head: usize, relation: impl Into<String>) -> Self {
        DepArc {
            dependent,
            head,
            relation: relation.into(),
        }
    }
}

/// Violations of the dependency-tree well-formedness rules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    /// The arc list and token list disagree in length.
    #[error("sentence has {tokens} tokens but {arcs} arcs")]
    ArcCountMismatch { tokens: usize, arcs: usize },
    /// Token indices must be 1..=n in surface order.
    #[error("token at position {expected} carries index {found}")]
    BadTokenIndex { expected: usize, found: usize },
    /// An arc names a dependent outside 1..=n.
    #[error("arc dependent {dependent} is out of range for {len} tokens")]
    BadDependent { dependent: usize, len: usize },
    /// Two arcs share the same dependent token.
    #[error("token {token} appears as dependent in more than one arc")]
    DuplicateDependent { token: usize },
    /// An arc points at a head index outside 0..=n.
    #[error("token {dependent} attaches to head {head}, out of range for {len} tokens")]
    DanglingHead {
        dependent: usize,
        head: usize,
        len: usize,
    },
    /// The number of arcs with head 0 differs from one.
    #[error("expected exactly one root arc, found {roots}")]
    MultiRoot { roots: usize },
    /// Following head pointers from `token` never reaches the root.
    #[error("dependency arcs form a cycle through token {token}")]
    Cycle { token: usize },
}

/// A dependency-parsed sentence.
///
/// Emoticons are carried outside the token list as `(position, class)` pairs,
/// ordered by occurrence; `position` is the 1-based surface slot the emoticon
/// occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct DepSentence {
    tokens: Vec<Token>,
    arcs: Vec<DepArc>,
    emojis: Vec<(usize, EmojiClass)>,
}

impl DepSentence {
    /// Assembles a sentence without checking the tree invariants.
    ///
    /// Use [`DepSentence::validate`] (or [`DepSentence::new`]) before feeding
    /// the sentence to the rule engine.
    pub fn from_parts(
        tokens: Vec<Token>,
        arcs: Vec<DepArc>,
        emojis: Vec<(usize, EmojiClass)>,
    ) -> Self {
        DepSentence {
            tokens,
            arcs,
            emojis,
        }
    }

    /// Assembles a sentence and checks every tree invariant.
    pub fn new(
        tokens: Vec<Token>,
        arcs: Vec<DepArc>,
        emojis: Vec<(usize, EmojiClass)>,
    ) -> Result<Self, TreeError> {
        Self::from_parts(tokens, arcs, emojis).validate()
    }

    /// Checks that the arcs form a single-rooted acyclic tree covering every
    /// token exactly once, and returns the sentence unchanged if so.
    ///
    /// Validation is a pure check: validating an already valid sentence is the
    /// identity.
    pub fn validate(self) -> Result<Self, TreeError> {
        let n = self.tokens.len();
        if self.arcs.len() != n {
            return Err(TreeError::ArcCountMismatch {
                tokens: n,
                arcs: self.arcs.len(),
            });
        }
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.index != i + 1 {
                return Err(TreeError::BadTokenIndex {
                    expected: i + 1,
                    found: tok.index,
                });
            }
        }
        // head[i] = head of token i+1; filled from the arc list.
        let mut head = vec![usize::MAX; n];
        for arc in &self.arcs {
            if arc.dependent == 0 || arc.dependent > n {
                return Err(TreeError::BadDependent {
                    dependent: arc.dependent,
                    len: n,
                });
            }
            if head[arc.dependent - 1] != usize::MAX {
                return Err(TreeError::DuplicateDependent {
                    token: arc.dependent,
                });
            }
            if arc.head > n {
                return Err(TreeError::DanglingHead {
                    dependent: arc.dependent,
                    head: arc.head,
                    len: n,
                });
            }
            head[arc.dependent - 1] = arc.head;
        }
        let roots = head.iter().filter(|&&h| h == 0).count();
        if n > 0 && roots != 1 {
            return Err(TreeError::MultiRoot { roots });
        }
        // Walk head chains; every chain must reach the root without revisiting
        // a node that is still on the current path.
        let mut state = vec![0u8; n + 1]; // 0 = unseen, 1 = on path, 2 = done
        state[0] = 2;
        for start in 1..=n {
            if state[start] == 2 {
                continue;
            }
            let mut node = start;
            let mut path = Vec::new();
            loop {
                if state[node] == 1 {
                    return Err(TreeError::Cycle { token: node });
                }
                if state[node] == 2 {
                    break;
                }
                state[node] = 1;
                path.push(node);
                node = head[node - 1];
            }
            for p in path {
                state[p] = 2;
            }
        }
        Ok(self)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn arcs(&self) -> &[DepArc] {
        &self.arcs
    }

    pub fn emojis(&self) -> &[(usize, EmojiClass)] {
        &self.emojis
    }

    /// Number of tokens.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at 1-based position `index`.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    /// Head of the token at 1-based `index` (0 for the root), if the arc
    /// exists.
    pub fn head_of(&self, index: usize) -> Option<usize> {
        self.arcs
            .iter()
            .find(|a| a.dependent == index)
            .map(|a| a.head)
    }

    /// 1-based indices of the tokens whose head is `index`, in surface order.
    pub fn dependents_of(&self, index: usize) -> Vec<usize> {
        let mut deps: Vec<usize> = self
            .arcs
            .iter()
            .filter(|a| a.head == index)
            .map(|a| a.dependent)
            .collect();
        deps.sort_unstable();
        deps
    }

    /// Returns a copy with per-token strengths replaced by `strengths`
    /// (one value per token, clamped to `[-1, 1]`).
    ///
    /// Panics if `strengths.len() != self.len()`.
    pub fn with_strengths(&self, strengths: &[f64]) -> DepSentence {
        assert_eq!(
            strengths.len(),
            self.tokens.len(),
            "one strength per token required"
        );
        let tokens = self
            .tokens
            .iter()
            .zip(strengths)
            .map(|(t, &s)| t.clone().with_strength(s))
            .collect();
        DepSentence {
            tokens,
            arcs: self.arcs.clone(),
            emojis: self.emojis.clone(),
        }
    }
}
