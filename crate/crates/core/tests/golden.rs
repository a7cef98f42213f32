//! Compares engine output on the bundled mini corpus against checked-in
//! expected-output files. The expected values were produced by scoring each
//! sentence by hand against the rule definitions, never by running the
//! engine, so these tests catch regressions in either direction.

mod common;

use std::fs;

use depsent::harness::{ablate, evaluate_hybrid, evaluate_rules_only};
use depsent::{EmbeddingTable, FallbackModel};

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

#[test]
fn rules_only_report_matches_expected_file() {
    let fx = common::load_fixtures();
    let report = evaluate_rules_only(&fx.sentences, &fx.labels, &fx.lexicon, &fx.cfg).unwrap();
    let actual = [
        ("tp", report.confusion.true_pos.to_string()),
        ("fp", report.confusion.false_pos.to_string()),
        ("fn", report.confusion.false_neg.to_string()),
        ("tn", report.confusion.true_neg.to_string()),
        ("precision", fmt6(report.metrics.precision)),
        ("recall", fmt6(report.metrics.recall)),
        ("f_measure", fmt6(report.metrics.f_measure)),
        ("accuracy", fmt6(report.metrics.accuracy)),
        ("unclassified_rate", fmt6(report.unclassified_rate)),
    ];
    let text = fs::read_to_string(common::golden_path("eval_rules.tsv")).unwrap();
    let expected: Vec<&str> = text.lines().collect();
    assert_eq!(expected.len(), actual.len(), "expected file line count");
    for ((key, value), line) in actual.iter().zip(&expected) {
        assert_eq!(&format!("{key}\t{value}"), line, "mismatch for `{key}`");
    }
    assert!(!report.metrics.degenerate);
}

#[test]
fn hybrid_with_neutral_model_matches_hand_scored_matrix() {
    // A zero-weight network scores every input [0.5, 0.5]; the tie resolves
    // positive, so the hybrid result equals the rules-only result with
    // undecided sentences defaulted to positive. The three undecided
    // sentences split two gold-positive / one gold-negative.
    let fx = common::load_fixtures();
    let table = EmbeddingTable::load(&common::data_path("embeddings.vec"))
        .expect("bundled embeddings load")
        .table;
    let model = FallbackModel::zeroed(50, table.dim(), 8);
    let report = evaluate_hybrid(
        &fx.sentences,
        &fx.labels,
        &fx.lexicon,
        &fx.cfg,
        &model,
        &table,
    )
    .unwrap();
    assert_eq!(report.confusion.true_pos, 20);
    assert_eq!(report.confusion.false_pos, 1);
    assert_eq!(report.confusion.false_neg, 0);
    assert_eq!(report.confusion.true_neg, 19);
    assert_eq!(report.unclassified_rate, 3.0 / 40.0);
    assert_eq!(report.fallback_pos_rate, Some(2.0 / 20.0));
    assert_eq!(report.fallback_neg_rate, Some(1.0 / 20.0));
}

#[test]
fn ablation_matches_expected_file() {
    let fx = common::load_fixtures();
    let rows = ablate(&fx.sentences, &fx.labels, &fx.lexicon, &fx.cfg).unwrap();
    let text = fs::read_to_string(common::golden_path("ablation.tsv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("rule\tprecision\trecall\tf_measure\taccuracy"),
        "header row"
    );
    let expected: Vec<&str> = lines.collect();
    assert_eq!(expected.len(), rows.len(), "one row per rule");
    for (row, line) in rows.iter().zip(&expected) {
        let actual = format!(
            "{}\t{}\t{}\t{}\t{}",
            row.rule,
            fmt6(row.metrics.precision),
            fmt6(row.metrics.recall),
            fmt6(row.metrics.f_measure),
            fmt6(row.metrics.accuracy)
        );
        assert_eq!(&actual, line, "ablation row for {}", row.rule);
    }
}
