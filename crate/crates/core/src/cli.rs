//! The `depsent` command line: classify, trace, train-fallback, eval and
//! ablate over files on disk.
//!
//! Exit codes are part of the contract: `0` success, `1` usage errors
//! (including missing required options), `2` data errors (unreadable or
//! malformed files, misaligned inputs).

use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::fallback::{EmbeddingTable, FallbackModel, TrainOptions};
use crate::harness::{
    ablate, compute_macro_metrics, evaluate_hybrid, evaluate_rules_only, hybrid_classify,
    sentence_vector, split_dataset, EvalReport, Provenance,
};
use crate::ingest::{load_conll, load_corpus, EmojiTable, Label, Normalizer};
use crate::lexicon::Lexicon;
use crate::rules::{classify_rules, RuleConfig};
use crate::sentence::DepSentence;

/// Errors surfaced to the user, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The command line itself is wrong (exit code 1).
    #[error("{0}")]
    Usage(String),
    /// Input files are missing, unreadable or malformed (exit code 2).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data_err(err: impl std::fmt::Display) -> CliError {
    CliError::Data(err.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "depsent",
    version,
    about = "Persian sentiment classification over dependency-parsed sentences"
)]
pub struct Cli {
    /// Seed driving dataset splits, weight initialization and shuffling.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Rule configuration file; built-in defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Word-strength lexicon, one `word<TAB>strength` per line.
    #[arg(long, global = true, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,

    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify parsed sentences; one `index  polarity  provenance` line each.
    Classify {
        /// Dependency-parsed sentences (tab-separated blocks).
        #[arg(long, value_name = "PATH")]
        trees: PathBuf,
        /// Trained fallback model; enables hybrid mode.
        #[arg(long, value_name = "PATH", requires = "embeddings")]
        model: Option<PathBuf>,
        /// Word-embedding table for the fallback model.
        #[arg(long, value_name = "PATH", requires = "model")]
        embeddings: Option<PathBuf>,
    },
    /// Classify with the rules and print every decision step.
    Trace {
        /// Dependency-parsed sentences (tab-separated blocks).
        #[arg(long, value_name = "PATH")]
        trees: PathBuf,
    },
    /// Train the fallback network on a labelled corpus and save it.
    TrainFallback {
        /// Labelled corpus, one `label<TAB>text` line per sentence.
        #[arg(long, value_name = "PATH")]
        corpus: PathBuf,
        /// Parsed sentences aligned with the corpus by position.
        #[arg(long, value_name = "PATH")]
        trees: PathBuf,
        /// Word-embedding table (`count dim` header, then `word c1..ck`).
        #[arg(long, value_name = "PATH")]
        embeddings: PathBuf,
        /// Where to write the trained model.
        #[arg(long, value_name = "PATH")]
        model_out: PathBuf,
        /// Where to write the per-epoch loss curve as CSV.
        #[arg(long, value_name = "PATH")]
        history_out: PathBuf,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        /// Hidden-layer width.
        #[arg(long, default_value_t = 128)]
        hidden: usize,
        /// Word capacity per sentence; longer sentences are truncated.
        #[arg(long, default_value_t = 50)]
        max_len: usize,
        /// Stop early after this many epochs without validation improvement.
        #[arg(long)]
        patience: Option<usize>,
    },
    /// Score a labelled corpus and print the metrics as key/value TSV.
    Eval {
        #[arg(long, value_enum)]
        mode: EvalMode,
        #[arg(long, value_name = "PATH")]
        corpus: PathBuf,
        #[arg(long, value_name = "PATH")]
        trees: PathBuf,
        /// Trained fallback model (hybrid mode).
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Word-embedding table (hybrid mode).
        #[arg(long, value_name = "PATH")]
        embeddings: Option<PathBuf>,
        /// Also print macro-averaged precision, recall and F-measure.
        #[arg(long = "macro")]
        macro_avg: bool,
    },
    /// Evaluate each rule on its own and print one TSV row per rule.
    Ablate {
        #[arg(long, value_name = "PATH")]
        corpus: PathBuf,
        #[arg(long, value_name = "PATH")]
        trees: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    /// Rule engine only; undecided sentences score as positive.
    Rules,
    /// Rules plus the fallback network.
    Hybrid,
}

/// Everything the subcommands share: rule config, normalizer, emoticons.
struct Context {
    cfg: RuleConfig,
    normalizer: Normalizer,
    emoji: EmojiTable,
    quiet: bool,
}

impl Context {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let cfg = match &cli.config {
            Some(path) => RuleConfig::load(path).map_err(data_err)?,
            None => RuleConfig::default(),
        };
        Ok(Context {
            cfg,
            normalizer: Normalizer::with_default_map(),
            emoji: EmojiTable::default(),
            quiet: cli.quiet,
        })
    }

    fn warn(&self, message: &str) {
        if !self.quiet {
            eprintln!("warning: {message}");
        }
    }

    fn load_lexicon(&self, cli: &Cli) -> Result<Lexicon, CliError> {
        let path = cli.lexicon.as_ref().ok_or_else(|| {
            CliError::Usage("--lexicon is required for this command".to_string())
        })?;
        let (lexicon, stats) = Lexicon::load(path, &self.normalizer).map_err(data_err)?;
        if stats.duplicates > 0 {
            self.warn(&format!(
                "lexicon: {} duplicate words, later entries kept",
                stats.duplicates
            ));
        }
        if let Some(factor) = stats.rescale_factor {
            self.warn(&format!(
                "lexicon: strengths exceeded 1 and were rescaled by {factor}"
            ));
        }
        Ok(lexicon)
    }

    fn load_trees(&self, path: &PathBuf) -> Result<Vec<DepSentence>, CliError> {
        load_conll(path, &self.normalizer, &self.emoji).map_err(data_err)
    }

    fn load_embeddings(&self, path: &PathBuf) -> Result<EmbeddingTable, CliError> {
        let load = EmbeddingTable::load(path).map_err(data_err)?;
        if load.declared != load.loaded {
            self.warn(&format!(
                "embeddings: header declares {} words but {} were read",
                load.declared, load.loaded
            ));
        }
        Ok(load.table)
    }
}

fn load_model_pair(
    ctx: &Context,
    model: &Option<PathBuf>,
    embeddings: &Option<PathBuf>,
) -> Result<Option<(FallbackModel, EmbeddingTable)>, CliError> {
    match (model, embeddings) {
        (Some(model_path), Some(emb_path)) => {
            let model = FallbackModel::load(model_path).map_err(data_err)?;
            let table = ctx.load_embeddings(emb_path)?;
            if table.dim() != model.dim() {
                return Err(CliError::Data(format!(
                    "embedding dimensionality {} does not match the model's {}",
                    table.dim(),
                    model.dim()
                )));
            }
            Ok(Some((model, table)))
        }
        (None, None) => Ok(None),
        _ => Err(CliError::Usage(
            "--model and --embeddings must be given together".to_string(),
        )),
    }
}

/// Loads a labelled corpus and its parse trees, insisting they align.
fn load_aligned(
    ctx: &Context,
    corpus: &PathBuf,
    trees: &PathBuf,
) -> Result<(Vec<DepSentence>, Vec<Label>), CliError> {
    let corpus = load_corpus(corpus).map_err(data_err)?;
    let sentences = ctx.load_trees(trees)?;
    if corpus.len() != sentences.len() {
        return Err(CliError::Data(format!(
            "corpus has {} records but the tree file has {} sentences",
            corpus.len(),
            sentences.len()
        )));
    }
    Ok((sentences, corpus.labels()))
}

fn format_metric(value: f64) -> String {
    format!("{value:.6}")
}

fn render_report(report: &EvalReport, macro_avg: bool) -> String {
    let c = &report.confusion;
    let m = &report.metrics;
    let mut out = String::new();
    let _ = writeln!(out, "tp\t{}", c.true_pos);
    let _ = writeln!(out, "fp\t{}", c.false_pos);
    let _ = writeln!(out, "fn\t{}", c.false_neg);
    let _ = writeln!(out, "tn\t{}", c.true_neg);
    let _ = writeln!(out, "precision\t{}", format_metric(m.precision));
    let _ = writeln!(out, "recall\t{}", format_metric(m.recall));
    let _ = writeln!(out, "f_measure\t{}", format_metric(m.f_measure));
    let _ = writeln!(out, "accuracy\t{}", format_metric(m.accuracy));
    let _ = writeln!(
        out,
        "unclassified_rate\t{}",
        format_metric(report.unclassified_rate)
    );
    if let Some(rate) = report.fallback_pos_rate {
        let _ = writeln!(out, "fallback_pos_rate\t{}", format_metric(rate));
    }
    if let Some(rate) = report.fallback_neg_rate {
        let _ = writeln!(out, "fallback_neg_rate\t{}", format_metric(rate));
    }
    if macro_avg {
        // The confusion matrix is never empty here: reports come from
        // evaluations that reject empty inputs.
        let macros = compute_macro_metrics(c).expect("non-empty confusion");
        let _ = writeln!(out, "precision_macro\t{}", format_metric(macros.precision));
        let _ = writeln!(out, "recall_macro\t{}", format_metric(macros.recall));
        let _ = writeln!(out, "f_measure_macro\t{}", format_metric(macros.f_measure));
    }
    out
}

fn run_classify(
    ctx: &Context,
    cli: &Cli,
    trees: &PathBuf,
    model: &Option<PathBuf>,
    embeddings: &Option<PathBuf>,
) -> Result<(), CliError> {
    let lexicon = ctx.load_lexicon(cli)?;
    let sentences = ctx.load_trees(trees)?;
    let pair = load_model_pair(ctx, model, embeddings)?;
    for (i, sentence) in sentences.iter().enumerate() {
        let (polarity, provenance) = match &pair {
            Some((model, table)) => hybrid_classify(sentence, &lexicon, &ctx.cfg, model, table),
            None => {
                let scored = lexicon.assign_strengths(sentence);
                (classify_rules(&scored, &ctx.cfg).polarity, Provenance::Rule)
            }
        };
        println!("{}\t{}\t{}", i + 1, polarity, provenance);
    }
    Ok(())
}

fn run_trace(ctx: &Context, cli: &Cli, trees: &PathBuf) -> Result<(), CliError> {
    let lexicon = ctx.load_lexicon(cli)?;
    let sentences = ctx.load_trees(trees)?;
    for (i, sentence) in sentences.iter().enumerate() {
        let scored = lexicon.assign_strengths(sentence);
        let outcome = classify_rules(&scored, &ctx.cfg);
        println!("sentence {}\t{}", i + 1, outcome.polarity);
        for step in &outcome.trace {
            println!("  {step}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_train(
    ctx: &Context,
    cli: &Cli,
    corpus: &PathBuf,
    trees: &PathBuf,
    embeddings: &PathBuf,
    model_out: &PathBuf,
    history_out: &PathBuf,
    epochs: usize,
    batch_size: usize,
    hidden: usize,
    max_len: usize,
    patience: Option<usize>,
) -> Result<(), CliError> {
    let (sentences, labels) = load_aligned(ctx, corpus, trees)?;
    let table = ctx.load_embeddings(embeddings)?;
    let split = split_dataset(&labels, cli.seed).map_err(data_err)?;

    let vectors = |indices: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut xs = Vec::with_capacity(indices.len());
        let mut ys = Vec::with_capacity(indices.len());
        for &i in indices {
            xs.push(sentence_vector(&sentences[i], &table, max_len));
            ys.push(match labels[i] {
                Label::Pos => 0,
                Label::Neg => 1,
            });
        }
        (xs, ys)
    };
    let (train_x, train_y) = vectors(&split.train);
    let (val_x, val_y) = vectors(&split.val);

    let mut model = FallbackModel::new(max_len, table.dim(), hidden, cli.seed);
    let opts = TrainOptions {
        epochs,
        batch_size,
        patience,
        ..TrainOptions::default()
    };
    let history = model
        .train(&train_x, &train_y, Some((&val_x, &val_y)), &opts)
        .map_err(data_err)?;
    model.save(model_out).map_err(data_err)?;

    let mut csv = String::from("epoch,loss,val_loss\n");
    for (epoch, (train, val)) in history.train.iter().zip(&history.val).enumerate() {
        let _ = writeln!(csv, "{},{:.6},{:.6}", epoch + 1, train, val);
    }
    std::fs::write(history_out, csv).map_err(data_err)?;

    if !ctx.quiet {
        eprintln!(
            "trained {} epochs on {} sentences; final loss {:.6}",
            history.train.len(),
            train_x.len(),
            history.train.last().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn run_eval(
    ctx: &Context,
    cli: &Cli,
    mode: EvalMode,
    corpus: &PathBuf,
    trees: &PathBuf,
    model: &Option<PathBuf>,
    embeddings: &Option<PathBuf>,
    macro_avg: bool,
) -> Result<(), CliError> {
    let lexicon = ctx.load_lexicon(cli)?;
    let (sentences, labels) = load_aligned(ctx, corpus, trees)?;
    let report = match mode {
        EvalMode::Rules => {
            evaluate_rules_only(&sentences, &labels, &lexicon, &ctx.cfg).map_err(data_err)?
        }
        EvalMode::Hybrid => {
            let (model, table) = load_model_pair(ctx, model, embeddings)?.ok_or_else(|| {
                CliError::Usage(
                    "--mode hybrid requires --model and --embeddings".to_string(),
                )
            })?;
            evaluate_hybrid(&sentences, &labels, &lexicon, &ctx.cfg, &model, &table)
                .map_err(data_err)?
        }
    };
    print!("{}", render_report(&report, macro_avg));
    Ok(())
}

fn run_ablate(
    ctx: &Context,
    cli: &Cli,
    corpus: &PathBuf,
    trees: &PathBuf,
) -> Result<(), CliError> {
    let lexicon = ctx.load_lexicon(cli)?;
    let (sentences, labels) = load_aligned(ctx, corpus, trees)?;
    let rows = ablate(&sentences, &labels, &lexicon, &ctx.cfg).map_err(data_err)?;
    println!("rule\tprecision\trecall\tf_measure\taccuracy");
    for row in rows {
        println!(
            "{}\t{}\t{}\t{}\t{}",
            row.rule.name(),
            format_metric(row.metrics.precision),
            format_metric(row.metrics.recall),
            format_metric(row.metrics.f_measure),
            format_metric(row.metrics.accuracy)
        );
    }
    Ok(())
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Context::from_cli(cli)?;
    match &cli.command {
        Command::Classify {
            trees,
            model,
            embeddings,
        } => run_classify(&ctx, cli, trees, model, embeddings),
        Command::Trace { trees } => run_trace(&ctx, cli, trees),
        Command::TrainFallback {
            corpus,
            trees,
            embeddings,
            model_out,
            history_out,
            epochs,
            batch_size,
            hidden,
            max_len,
            patience,
        } => run_train(
            &ctx,
            cli,
            corpus,
            trees,
            embeddings,
            model_out,
            history_out,
            *epochs,
            *batch_size,
            *hidden,
            *max_len,
            *patience,
        ),
        Command::Eval {
            mode,
            corpus,
            trees,
            model,
            embeddings,
            macro_avg,
        } => run_eval(
            &ctx, cli, *mode, corpus, trees, model, embeddings, *macro_avg,
        ),
        Command::Ablate { corpus, trees } => run_ablate(&ctx, cli, corpus, trees),
    }
}
