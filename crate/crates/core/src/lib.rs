//! Sentiment polarity for Persian product reviews and short opinionated text.
//!
//! The library classifies a dependency-parsed sentence as positive or
//! negative by walking its parse tree with a set of grammar-aware rules:
//! adversative and subordinate clauses narrow the sentence to the segment
//! that carries the verdict, negation flips the words governed by the
//! negating token, prepositions and derivational prefixes force or invert
//! strengths, and noun–adjective pairs are collapsed onto the adjective.
//! Word strengths come from a plain TSV lexicon; whatever the rules cannot
//! decide is handed to a small trainable feed-forward network over word
//! embeddings, so the combined classifier always returns an answer.
//!
//! The crate is organised around the pipeline:
//!
//! * [`ingest`] — tokenization, orthographic normalization, emoticon
//!   extraction, and readers for CoNLL-style trees and labelled corpora.
//! * [`sentence`] — validated dependency sentences and the polarity types.
//! * [`lexicon`] — the word-strength table and strength assignment.
//! * [`rules`] — the rule engine: segment selection, strength transforms,
//!   aggregation, and a replayable decision trace.
//! * [`fallback`] — embedding lookup plus the from-scratch network (forward
//!   pass, backpropagation, Adam) with a binary on-disk format.
//! * [`harness`] — hybrid routing, stratified splits, confusion-matrix
//!   metrics, evaluation reports, and single-rule ablation.
//! * [`cli`] — the `depsent` command-line interface.

pub mod cli;
pub mod fallback;
pub mod harness;
pub mod ingest;
pub mod lexicon;
pub mod rules;
pub mod sentence;

pub use fallback::{EmbeddingTable, FallbackModel, TrainHistory, TrainOptions};
pub use harness::{hybrid_classify, Confusion, EvalReport, Metrics, Provenance};
pub use ingest::{EmojiTable, Label, Normalizer, RawCorpus};
pub use lexicon::Lexicon;
pub use rules::{classify_rules, RuleConfig, RuleKind, RuleOutcome, Segment, TraceStep};
pub use sentence::{DepArc, DepSentence, EmojiClass, Polarity, Token};
