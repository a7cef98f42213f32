//! Hybrid routing and the evaluation harness.
//!
//! This module combines the rule engine with the fallback network: the rules
//! decide whenever they can, and every sentence they leave unclassified is
//! routed to the network, so the hybrid classifier always takes a side. On
//! top of that sit the measurement tools: deterministic stratified
//! train/validation/test splits, confusion-matrix metrics with the positive
//! class as reference, full evaluation reports for both modes, and a
//! single-rule ablation sweep.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

use crate::fallback::{EmbeddingTable, FallbackModel};
use crate::ingest::Label;
use crate::lexicon::Lexicon;
use crate::rules::{classify_rules, RuleConfig, RuleKind, RuleMask};
use crate::sentence::{DepSentence, Polarity};

/// Which stage produced a hybrid decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// The rule engine reached a verdict on its own.
    Rule,
    /// The rules were undecided and the fallback network answered.
    Fallback,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Rule => f.write_str("rule"),
            Provenance::Fallback => f.write_str("fallback"),
        }
    }
}

/// Fixed-length network input for a sentence: the concatenated embeddings
/// of its non-empty normalized tokens, truncated or zero-padded to
/// `max_words` slots.
pub fn sentence_vector(
    sentence: &DepSentence,
    table: &EmbeddingTable,
    max_words: usize,
) -> Vec<f64> {
    let words: Vec<&str> = sentence
        .tokens()
        .iter()
        .map(|t| t.normalized.as_str())
        .filter(|w| !w.is_empty())
        .collect();
    table.vectorize(&words, max_words)
}

/// Classifies a sentence with the rules first and the fallback network
/// exactly when the rules stay undecided, so the result is never
/// [`Polarity::Unclassified`]. The fallback input is the concatenation of
/// the embeddings of the sentence's non-empty normalized tokens.
///
/// # Panics
///
/// Panics when the embedding dimensionality does not match the model.
pub fn hybrid_classify(
    sentence: &DepSentence,
    lexicon: &Lexicon,
    cfg: &RuleConfig,
    model: &FallbackModel,
    table: &EmbeddingTable,
) -> (Polarity, Provenance) {
    let scored = lexicon.assign_strengths(sentence);
    let outcome = classify_rules(&scored, cfg);
    if outcome.polarity != Polarity::Unclassified {
        return (outcome.polarity, Provenance::Rule);
    }
    assert_eq!(
        table.dim(),
        model.dim(),
        "embedding dimensionality must match the fallback model"
    );
    let x = sentence_vector(&scored, table, model.max_words());
    (model.predict(&x), Provenance::Fallback)
}

/// Dataset splitting failures.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("need at least 10 records to split, got {0}")]
    TooSmall(usize),
}

/// Index sets of a 60/10/30 train/validation/test partition. The three
/// lists are disjoint, cover every record exactly once, and are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits record indices 60/10/30, stratified by label: each split's class
/// counts stay within one item of the corpus-wide ratio. Shuffling is
/// driven entirely by `seed`, so the same inputs always produce the same
/// partition. Split sizes are the rounded shares `round(0.6·N)` and
/// `round(0.1·N)`, with the test split taking the remainder.
pub fn split_dataset(labels: &[Label], seed: u64) -> Result<SplitIndices, SplitError> {
    let n = labels.len();
    if n < 10 {
        return Err(SplitError::TooSmall(n));
    }
    // Integer rounding keeps the totals exact: round(0.6·N) = (6N+5)/10.
    let n_train = (6 * n + 5) / 10;
    let n_val = (n + 5) / 10;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    for (i, label) in labels.iter().enumerate() {
        let slot = match label {
            Label::Pos => 0,
            Label::Neg => 1,
        };
        classes[slot].push(i);
    }
    for class in classes.iter_mut() {
        class.shuffle(&mut rng);
    }

    // Largest-remainder allocation of a quota across the classes, capped by
    // how many items each class still has available.
    let allocate = |quota: usize, avail: &[usize]| -> Vec<usize> {
        let mut shares: Vec<usize> = classes
            .iter()
            .map(|c| quota * c.len() / n)
            .collect();
        for (share, &cap) in shares.iter_mut().zip(avail) {
            *share = (*share).min(cap);
        }
        let mut remainders: Vec<(usize, usize)> = classes
            .iter()
            .enumerate()
            .map(|(slot, c)| (slot, (quota * c.len()) % n))
            .collect();
        remainders.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut leftover = quota - shares.iter().sum::<usize>();
        while leftover > 0 {
            let before = leftover;
            for &(slot, _) in &remainders {
                if leftover == 0 {
                    break;
                }
                if shares[slot] < avail[slot] {
                    shares[slot] += 1;
                    leftover -= 1;
                }
            }
            assert!(leftover < before, "split allocation cannot make progress");
        }
        shares
    };

    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let train_shares = allocate(n_train, &sizes);
    let remaining: Vec<usize> = sizes
        .iter()
        .zip(&train_shares)
        .map(|(&s, &t)| s - t)
        .collect();
    let val_shares = allocate(n_val, &remaining);

    let mut split = SplitIndices {
        train: Vec::with_capacity(n_train),
        val: Vec::with_capacity(n_val),
        test: Vec::with_capacity(n - n_train - n_val),
    };
    for (slot, class) in classes.iter().enumerate() {
        let t = train_shares[slot];
        let v = val_shares[slot];
        split.train.extend(&class[..t]);
        split.val.extend(&class[t..t + v]);
        split.test.extend(&class[t + v..]);
    }
    split.train.sort_unstable();
    split.val.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Two-by-two confusion counts with positive as the reference class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Tallies one decided prediction against its gold label.
    ///
    /// # Panics
    ///
    /// Panics on [`Polarity::Unclassified`]; map undecided outcomes to a
    /// class before counting.
    pub fn record(&mut self, gold: Label, predicted: Polarity) {
        match (gold, predicted) {
            (Label::Pos, Polarity::Positive) => self.true_pos += 1,
            (Label::Neg, Polarity::Positive) => self.false_pos += 1,
            (Label::Pos, Polarity::Negative) => self.false_neg += 1,
            (Label::Neg, Polarity::Negative) => self.true_neg += 1,
            (_, Polarity::Unclassified) => {
                panic!("confusion counts need a decided polarity")
            }
        }
    }
}

/// Evaluation failures.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation set is empty")]
    Empty,
    #[error("{sentences} sentences but {labels} labels")]
    LengthMismatch { sentences: usize, labels: usize },
}

/// Precision, recall, F-measure and accuracy with positive as reference.
/// `degenerate` flags that some denominator was zero and the affected
/// metrics were reported as `0.0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
    pub degenerate: bool,
}

fn ratio(num: usize, denom: usize, degenerate: &mut bool) -> f64 {
    if denom == 0 {
        *degenerate = true;
        0.0
    } else {
        num as f64 / denom as f64
    }
}

fn f_measure(precision: f64, recall: f64, degenerate: &mut bool) -> f64 {
    if precision + recall == 0.0 {
        *degenerate = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Positive-reference metrics from a confusion matrix.
pub fn compute_metrics(c: &Confusion) -> Result<Metrics, EvalError> {
    if c.total() == 0 {
        return Err(EvalError::Empty);
    }
    let mut degenerate = false;
    let precision = ratio(c.true_pos, c.true_pos + c.false_pos, &mut degenerate);
    let recall = ratio(c.true_pos, c.true_pos + c.false_neg, &mut degenerate);
    let f = f_measure(precision, recall, &mut degenerate);
    let accuracy = c.true_pos.saturating_add(c.true_neg) as f64 / c.total() as f64;
    Ok(Metrics {
        precision,
        recall,
        f_measure: f,
        accuracy,
        degenerate,
    })
}

/// Macro-averaged metrics: the mean of the positive-reference and
/// negative-reference variants of each measure.
pub fn compute_macro_metrics(c: &Confusion) -> Result<Metrics, EvalError> {
    if c.total() == 0 {
        return Err(EvalError::Empty);
    }
    let mut degenerate = false;
    let p_pos = ratio(c.true_pos, c.true_pos + c.false_pos, &mut degenerate);
    let p_neg = ratio(c.true_neg, c.true_neg + c.false_neg, &mut degenerate);
    let r_pos = ratio(c.true_pos, c.true_pos + c.false_neg, &mut degenerate);
    let r_neg = ratio(c.true_neg, c.true_neg + c.false_pos, &mut degenerate);
    let f_pos = f_measure(p_pos, r_pos, &mut degenerate);
    let f_neg = f_measure(p_neg, r_neg, &mut degenerate);
    let accuracy = (c.true_pos + c.true_neg) as f64 / c.total() as f64;
    Ok(Metrics {
        precision: (p_pos + p_neg) / 2.0,
        recall: (r_pos + r_neg) / 2.0,
        f_measure: (f_pos + f_neg) / 2.0,
        accuracy,
        degenerate,
    })
}

/// One row of a single-rule ablation: the engine ran with only this rule
/// enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub rule: RuleKind,
    pub confusion: Confusion,
    pub metrics: Metrics,
}

/// Everything one evaluation run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub confusion: Confusion,
    pub metrics: Metrics,
    /// Fraction of sentences the rules left undecided. In hybrid mode this
    /// equals the fraction routed to the fallback network, because routing
    /// happens exactly on undecided sentences.
    pub unclassified_rate: f64,
    /// Hybrid mode: fraction of gold-positive sentences routed to fallback.
    pub fallback_pos_rate: Option<f64>,
    /// Hybrid mode: fraction of gold-negative sentences routed to fallback.
    pub fallback_neg_rate: Option<f64>,
    /// Populated by the ablation sweep, absent otherwise.
    pub per_rule: Option<Vec<AblationRow>>,
}

fn check_lengths(sentences: &[DepSentence], labels: &[Label]) -> Result<(), EvalError> {
    if sentences.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            sentences: sentences.len(),
            labels: labels.len(),
        });
    }
    if sentences.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

/// Evaluates the rule engine alone. Undecided sentences are counted into
/// `unclassified_rate` and then scored as positive, so the confusion matrix
/// always covers the whole set.
pub fn evaluate_rules_only(
    sentences: &[DepSentence],
    labels: &[Label],
    lexicon: &Lexicon,
    cfg: &RuleConfig,
) -> Result<EvalReport, EvalError> {
    check_lengths(sentences, labels)?;
    let mut confusion = Confusion::default();
    let mut unclassified = 0usize;
    for (sentence, &gold) in sentences.iter().zip(labels) {
        let scored = lexicon.assign_strengths(sentence);
        let mut polarity = classify_rules(&scored, cfg).polarity;
        if polarity == Polarity::Unclassified {
            unclassified += 1;
            polarity = Polarity::Positive;
        }
        confusion.record(gold, polarity);
    }
    let metrics = compute_metrics(&confusion)?;
    Ok(EvalReport {
        confusion,
        metrics,
        unclassified_rate: unclassified as f64 / sentences.len() as f64,
        fallback_pos_rate: None,
        fallback_neg_rate: None,
        per_rule: None,
    })
}

/// Evaluates the hybrid classifier: rules first, fallback network on every
/// undecided sentence. Reports the overall fallback fraction and its split
/// by gold label.
pub fn evaluate_hybrid(
    sentences: &[DepSentence],
    labels: &[Label],
    lexicon: &Lexicon,
    cfg: &RuleConfig,
    model: &FallbackModel,
    table: &EmbeddingTable,
) -> Result<EvalReport, EvalError> {
    check_lengths(sentences, labels)?;
    let mut confusion = Confusion::default();
    let mut routed = [0usize; 2];
    let mut gold_counts = [0usize; 2];
    for (sentence, &gold) in sentences.iter().zip(labels) {
        let slot = match gold {
            Label::Pos => 0,
            Label::Neg => 1,
        };
        gold_counts[slot] += 1;
        let (polarity, provenance) = hybrid_classify(sentence, lexicon, cfg, model, table);
        if provenance == Provenance::Fallback {
            routed[slot] += 1;
        }
        confusion.record(gold, polarity);
    }
    let metrics = compute_metrics(&confusion)?;
    let rate = |slot: usize| {
        if gold_counts[slot] == 0 {
            0.0
        } else {
            routed[slot] as f64 / gold_counts[slot] as f64
        }
    };
    Ok(EvalReport {
        confusion,
        metrics,
        unclassified_rate: (routed[0] + routed[1]) as f64 / sentences.len() as f64,
        fallback_pos_rate: Some(rate(0)),
        fallback_neg_rate: Some(rate(1)),
        per_rule: None,
    })
}

/// Runs the rule engine once per rule with only that rule enabled and
/// reports each run's metrics, sorted by ascending accuracy; equal
/// accuracies keep the canonical rule order.
pub fn ablate(
    sentences: &[DepSentence],
    labels: &[Label],
    lexicon: &Lexicon,
    cfg: &RuleConfig,
) -> Result<Vec<AblationRow>, EvalError> {
    check_lengths(sentences, labels)?;
    let mut rows = Vec::with_capacity(RuleKind::COUNT);
    for kind in RuleKind::ALL {
        let mut solo = cfg.clone();
        solo.enabled = RuleMask::only(kind);
        let report = evaluate_rules_only(sentences, labels, lexicon, &solo)?;
        rows.push(AblationRow {
            rule: kind,
            confusion: report.confusion,
            metrics: report.metrics,
        });
    }
    rows.sort_by(|a, b| {
        a.metrics
            .accuracy
            .total_cmp(&b.metrics.accuracy)
            .then(a.rule.index().cmp(&b.rule.index()))
    });
    Ok(rows)
}
