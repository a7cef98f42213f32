//! End-to-end tests of the `depsent` binary: output formats, exit codes and
//! the train-then-evaluate round trip, all over the bundled data files.

mod common;

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use common::{data_path, golden_path};

fn depsent() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depsent"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

fn run_err(cmd: &mut Command, expected_code: i32) -> String {
    let out: Output = cmd.output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(expected_code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn lines(text: &str) -> Vec<&str> {
    text.lines().collect()
}

fn golden_lines(name: &str) -> Vec<String> {
    fs::read_to_string(golden_path(name))
        .expect("expected-output file exists")
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn help_and_version_exit_zero() {
    let help = run_ok(depsent().arg("--help"));
    assert!(help.contains("depsent"));
    assert!(help.contains("classify"));
    run_ok(depsent().arg("--version"));
}

#[test]
fn classify_prints_one_line_per_sentence() {
    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("classify")
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
    );
    let rows = lines(&stdout);
    assert_eq!(rows.len(), 40);
    assert_eq!(rows[0], "1\tpositive\trule");
    let mut unclassified = 0;
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split('\t').collect();
        assert_eq!(fields.len(), 3, "bad row: {row}");
        assert_eq!(fields[0], (i + 1).to_string());
        assert!(matches!(fields[1], "positive" | "negative" | "unclassified"));
        assert_eq!(fields[2], "rule", "rules-only runs never use the fallback");
        if fields[1] == "unclassified" {
            unclassified += 1;
        }
    }
    assert_eq!(unclassified, 3);
}

#[test]
fn eval_rules_matches_bundled_expectations() {
    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("eval")
            .arg("--mode")
            .arg("rules")
            .arg("--corpus")
            .arg(data_path("mini_corpus.tsv"))
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
    );
    assert_eq!(lines(&stdout), golden_lines("eval_rules.tsv"));
}

#[test]
fn eval_macro_appends_three_rows() {
    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("eval")
            .arg("--mode")
            .arg("rules")
            .arg("--corpus")
            .arg(data_path("mini_corpus.tsv"))
            .arg("--trees")
            .arg(data_path("mini_trees.conll"))
            .arg("--macro"),
    );
    let rows = lines(&stdout);
    let base = golden_lines("eval_rules.tsv");
    assert_eq!(rows.len(), base.len() + 3);
    assert_eq!(&rows[..base.len()], base.as_slice());
    for (row, key) in rows[base.len()..]
        .iter()
        .zip(["precision_macro", "recall_macro", "f_measure_macro"])
    {
        let (name, value) = row.split_once('\t').expect("key-value row");
        assert_eq!(name, key);
        let value: f64 = value.parse().expect("numeric metric");
        assert!((0.0..=1.0).contains(&value));
    }
}

#[test]
fn ablate_matches_bundled_expectations() {
    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("ablate")
            .arg("--corpus")
            .arg(data_path("mini_corpus.tsv"))
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
    );
    assert_eq!(lines(&stdout), golden_lines("ablation.tsv"));
}

#[test]
fn trace_labels_every_sentence() {
    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("trace")
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
    );
    let rows = lines(&stdout);
    let headers: Vec<&&str> = rows.iter().filter(|r| r.starts_with("sentence ")).collect();
    assert_eq!(headers.len(), 40);
    assert_eq!(*headers[0], "sentence 1\tpositive");
    for row in &rows {
        assert!(
            row.starts_with("sentence ") || row.starts_with("  "),
            "unexpected line shape: {row}"
        );
    }
    let aggregates = rows.iter().filter(|r| r.starts_with("  aggregate")).count();
    assert_eq!(aggregates, 40, "every sentence records exactly one aggregation");
}

#[test]
fn config_mirror_of_defaults_changes_nothing() {
    let classify = |config: Option<PathBuf>| {
        let mut cmd = depsent();
        cmd.arg("--lexicon").arg(data_path("lexicon.tsv"));
        if let Some(path) = config {
            cmd.arg("--config").arg(path);
        }
        run_ok(
            cmd.arg("classify")
                .arg("--trees")
                .arg(data_path("mini_trees.conll")),
        )
    };
    assert_eq!(classify(Some(data_path("rules.conf"))), classify(None));
}

#[test]
fn config_length_cap_applies() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.conf");
    fs::write(&config, "max_sentence_len = 1\n").unwrap();
    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("--config")
            .arg(&config)
            .arg("classify")
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
    );
    for row in lines(&stdout) {
        assert!(row.ends_with("\tunclassified\trule"), "capped row: {row}");
    }
}

#[test]
fn malformed_config_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "no_such_key = 1\n").unwrap();
    let stderr = run_err(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("--config")
            .arg(&config)
            .arg("classify")
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
        2,
    );
    assert!(stderr.contains("error:"), "stderr: {stderr}");
}

#[test]
fn missing_lexicon_is_usage_error() {
    let stderr = run_err(
        depsent()
            .arg("classify")
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
        1,
    );
    assert!(stderr.contains("--lexicon"), "stderr: {stderr}");
}

#[test]
fn model_requires_embeddings() {
    let stderr = run_err(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("classify")
            .arg("--trees")
            .arg(data_path("mini_trees.conll"))
            .arg("--model")
            .arg("whatever.bin"),
        1,
    );
    assert!(stderr.contains("--embeddings"), "stderr: {stderr}");
}

#[test]
fn hybrid_eval_without_model_is_usage_error() {
    let stderr = run_err(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("eval")
            .arg("--mode")
            .arg("hybrid")
            .arg("--corpus")
            .arg(data_path("mini_corpus.tsv"))
            .arg("--trees")
            .arg(data_path("mini_trees.conll")),
        1,
    );
    assert!(stderr.contains("--model"), "stderr: {stderr}");
}

#[test]
fn unreadable_trees_is_data_error() {
    let stderr = run_err(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("classify")
            .arg("--trees")
            .arg("does-not-exist.conll"),
        2,
    );
    assert!(stderr.contains("error:"), "stderr: {stderr}");
}

#[test]
fn misaligned_corpus_and_trees_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("one.conll");
    fs::write(&short, "1\tخانه\tN\t0\tROOT\n").unwrap();
    let stderr = run_err(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("eval")
            .arg("--mode")
            .arg("rules")
            .arg("--corpus")
            .arg(data_path("mini_corpus.tsv"))
            .arg("--trees")
            .arg(&short),
        2,
    );
    assert!(stderr.contains("records"), "stderr: {stderr}");
}

#[test]
fn train_then_hybrid_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("fallback.bin");
    let history_path = dir.path().join("history.csv");

    let out = depsent()
        .arg("train-fallback")
        .arg("--corpus")
        .arg(data_path("mini_corpus.tsv"))
        .arg("--trees")
        .arg(data_path("mini_trees.conll"))
        .arg("--embeddings")
        .arg(data_path("embeddings.vec"))
        .arg("--model-out")
        .arg(&model_path)
        .arg("--history-out")
        .arg(&history_path)
        .arg("--epochs")
        .arg("8")
        .arg("--hidden")
        .arg("8")
        .arg("--max-len")
        .arg("12")
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("trained 8 epochs"));

    assert!(model_path.metadata().unwrap().len() > 0);
    let history = fs::read_to_string(&history_path).unwrap();
    let rows = lines(&history);
    assert_eq!(rows[0], "epoch,loss,val_loss");
    assert_eq!(rows.len(), 9);
    for (i, row) in rows[1..].iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 3, "bad history row: {row}");
        assert_eq!(fields[0], (i + 1).to_string());
        for value in &fields[1..] {
            assert!(value.parse::<f64>().unwrap().is_finite());
        }
    }

    let stdout = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("eval")
            .arg("--mode")
            .arg("hybrid")
            .arg("--corpus")
            .arg(data_path("mini_corpus.tsv"))
            .arg("--trees")
            .arg(data_path("mini_trees.conll"))
            .arg("--model")
            .arg(&model_path)
            .arg("--embeddings")
            .arg(data_path("embeddings.vec")),
    );
    let rows = lines(&stdout);
    assert_eq!(rows.len(), 11);
    assert!(rows[9].starts_with("fallback_pos_rate\t"));
    assert!(rows[10].starts_with("fallback_neg_rate\t"));
    let count = |i: usize| {
        rows[i]
            .split_once('\t')
            .unwrap()
            .1
            .parse::<usize>()
            .unwrap()
    };
    assert_eq!(count(0) + count(1) + count(2) + count(3), 40);

    let classified = run_ok(
        depsent()
            .arg("--lexicon")
            .arg(data_path("lexicon.tsv"))
            .arg("classify")
            .arg("--trees")
            .arg(data_path("mini_trees.conll"))
            .arg("--model")
            .arg(&model_path)
            .arg("--embeddings")
            .arg(data_path("embeddings.vec")),
    );
    let rows = lines(&classified);
    assert_eq!(rows.len(), 40);
    let fallback = rows.iter().filter(|r| r.ends_with("\tfallback")).count();
    assert_eq!(fallback, 3, "exactly the undecided sentences take the fallback");
    assert!(rows.iter().all(|r| !r.ends_with("\tunclassified\tfallback")));
    assert!(rows
        .iter()
        .all(|r| !r.contains("\tunclassified\t")), "hybrid runs decide everything");
}
