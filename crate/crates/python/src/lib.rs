//! Python bindings for the depsent library.
//!
//! Exposes tokenization and normalization, dependency-tree parsing, the
//! word-strength lexicon, the rule engine with its step-by-step trace, the
//! fallback network and the evaluation entry points as a `depsent_py`
//! extension module.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use depsent::harness;
use depsent::ingest;
use depsent::rules::RuleKind;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_label(label: &str) -> PyResult<depsent::Label> {
    match label {
        "pos" => Ok(depsent::Label::Pos),
        "neg" => Ok(depsent::Label::Neg),
        other => Err(PyValueError::new_err(format!(
            "label must be \"pos\" or \"neg\", got {other:?}"
        ))),
    }
}

fn rule_kind(id: &str) -> PyResult<RuleKind> {
    RuleKind::from_id(id)
        .ok_or_else(|| PyValueError::new_err(format!("unknown rule id {id:?}")))
}

/// Spelling normalizer mapping informal variants to canonical forms.
#[pyclass(module = "depsent_py")]
struct Normalizer {
    inner: depsent::Normalizer,
}

#[pymethods]
impl Normalizer {
    /// The built-in variant map.
    #[new]
    fn new() -> Self {
        Normalizer {
            inner: depsent::Normalizer::with_default_map(),
        }
    }

    /// Loads a `variant<TAB>canonical` map from a file.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let inner = depsent::Normalizer::from_map_file(&path).map_err(value_err)?;
        Ok(Normalizer { inner })
    }

    /// Canonical form of one token.
    fn normalize(&self, token: &str) -> String {
        self.inner.normalize(token)
    }

    fn __len__(&self) -> usize {
        self.inner.map_len()
    }
}

/// One dependency-parsed sentence.
#[pyclass(module = "depsent_py")]
struct Sentence {
    inner: depsent::DepSentence,
}

#[pymethods]
impl Sentence {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Sentence({} tokens: {})",
            self.inner.len(),
            self.words().join(" ")
        )
    }

    /// Token surfaces in order.
    fn words(&self) -> Vec<String> {
        self.inner
            .tokens()
            .iter()
            .map(|t| t.surface.clone())
            .collect()
    }

    /// Normalized token forms in order.
    fn normalized(&self) -> Vec<String> {
        self.inner
            .tokens()
            .iter()
            .map(|t| t.normalized.clone())
            .collect()
    }

    /// Part-of-speech tags in order.
    fn pos_tags(&self) -> Vec<String> {
        self.inner.tokens().iter().map(|t| t.pos.clone()).collect()
    }

    /// Per-token sentiment strengths in order.
    fn strengths(&self) -> Vec<f64> {
        self.inner.tokens().iter().map(|t| t.strength).collect()
    }

    /// Head position of every token (0 marks the root), in order.
    fn heads(&self) -> Vec<usize> {
        self.inner.arcs().iter().map(|a| a.head).collect()
    }

    /// Dependency relation of every token, in order.
    fn relations(&self) -> Vec<String> {
        self.inner
            .arcs()
            .iter()
            .map(|a| a.relation.clone())
            .collect()
    }

    /// Emoticon annotations as `(position, class)` pairs.
    fn emojis(&self) -> Vec<(usize, String)> {
        self.inner
            .emojis()
            .iter()
            .map(|(pos, class)| (*pos, class.to_string()))
            .collect()
    }
}

/// Word-strength lexicon; lookups are spelling-normalized.
#[pyclass(module = "depsent_py")]
struct Lexicon {
    inner: depsent::Lexicon,
    normalizer: depsent::Normalizer,
}

#[pymethods]
impl Lexicon {
    /// Builds a lexicon from a `{word: strength}` mapping.
    #[new]
    fn new(entries: HashMap<String, f64>) -> Self {
        let normalizer = depsent::Normalizer::with_default_map();
        let (inner, _) = depsent::Lexicon::from_entries(entries, &normalizer);
        Lexicon { inner, normalizer }
    }

    /// Loads a `word<TAB>strength` file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let normalizer = depsent::Normalizer::with_default_map();
        let (inner, _) =
            depsent::Lexicon::load(&path, &normalizer).map_err(value_err)?;
        Ok(Lexicon { inner, normalizer })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, word: &str) -> bool {
        self.inner.contains(&self.normalizer.normalize(word))
    }

    /// Strength of a word, `0.0` when absent.
    fn strength(&self, word: &str) -> f64 {
        self.inner.lookup(&self.normalizer.normalize(word))
    }

    /// Copy of `sentence` with lexicon strengths filled in.
    fn assign_strengths(&self, sentence: &Sentence) -> Sentence {
        Sentence {
            inner: self.inner.assign_strengths(&sentence.inner),
        }
    }
}

/// Rule-engine configuration: trigger words, tag sets, length cap, mask.
#[pyclass(module = "depsent_py")]
struct RuleConfig {
    inner: depsent::RuleConfig,
}

#[pymethods]
impl RuleConfig {
    /// The built-in defaults.
    #[new]
    fn new() -> Self {
        RuleConfig {
            inner: depsent::RuleConfig::default(),
        }
    }

    /// Loads a `key = value, value` configuration file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = depsent::RuleConfig::load(&path).map_err(value_err)?;
        Ok(RuleConfig { inner })
    }

    /// Kebab-case ids of all ten rules, in canonical order.
    #[staticmethod]
    fn rule_ids() -> Vec<&'static str> {
        RuleKind::ALL.iter().map(|k| k.id()).collect()
    }

    /// Turns one rule off by id.
    fn disable(&mut self, rule_id: &str) -> PyResult<()> {
        self.inner.enabled.set(rule_kind(rule_id)?, false);
        Ok(())
    }

    /// Turns one rule on by id.
    fn enable(&mut self, rule_id: &str) -> PyResult<()> {
        self.inner.enabled.set(rule_kind(rule_id)?, true);
        Ok(())
    }

    /// Whether a rule is currently enabled.
    fn is_enabled(&self, rule_id: &str) -> PyResult<bool> {
        Ok(self.inner.enabled.enabled(rule_kind(rule_id)?))
    }

    #[getter]
    fn max_sentence_len(&self) -> usize {
        self.inner.max_sentence_len
    }

    #[setter]
    fn set_max_sentence_len(&mut self, cap: usize) {
        self.inner.max_sentence_len = cap;
    }
}

/// Rule-engine verdict with the steps that produced it.
#[pyclass(module = "depsent_py", get_all)]
struct Outcome {
    /// `"positive"`, `"negative"` or `"unclassified"`.
    polarity: String,
    /// Human-readable decision steps, in order.
    steps: Vec<String>,
}

#[pymethods]
impl Outcome {
    fn __repr__(&self) -> String {
        format!("Outcome({:?}, {} steps)", self.polarity, self.steps.len())
    }
}

/// Word-embedding lookup table.
#[pyclass(module = "depsent_py")]
struct EmbeddingTable {
    inner: depsent::EmbeddingTable,
}

#[pymethods]
impl EmbeddingTable {
    /// Loads a `count dim` header followed by `word c1..ck` rows.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let load = depsent::EmbeddingTable::load(&path).map_err(value_err)?;
        Ok(EmbeddingTable { inner: load.table })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Vector dimensionality.
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Embedding of one word, or `None` when absent.
    fn get(&self, word: &str) -> Option<Vec<f64>> {
        self.inner.get(word).map(<[f64]>::to_vec)
    }

    /// Fixed-length network input for a sentence: concatenated embeddings
    /// of its tokens, truncated or zero-padded to `max_words` words.
    fn vectorize(&self, sentence: &Sentence, max_words: usize) -> Vec<f64> {
        harness::sentence_vector(&sentence.inner, &self.inner, max_words)
    }
}

/// The trainable fallback classifier.
#[pyclass(module = "depsent_py")]
struct FallbackModel {
    inner: depsent::FallbackModel,
}

#[pymethods]
impl FallbackModel {
    /// Fresh model with seeded random weights.
    #[new]
    fn new(max_words: usize, dim: usize, hidden: usize, seed: u64) -> Self {
        FallbackModel {
            inner: depsent::FallbackModel::new(max_words, dim, hidden, seed),
        }
    }

    /// Model with all-zero weights; predicts positive everywhere.
    #[staticmethod]
    fn zeroed(max_words: usize, dim: usize, hidden: usize) -> Self {
        FallbackModel {
            inner: depsent::FallbackModel::zeroed(max_words, dim, hidden),
        }
    }

    /// Loads a saved model.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = depsent::FallbackModel::load(&path).map_err(value_err)?;
        Ok(FallbackModel { inner })
    }

    /// Saves the model.
    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(value_err)
    }

    #[getter]
    fn max_words(&self) -> usize {
        self.inner.max_words()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn hidden(&self) -> usize {
        self.inner.hidden()
    }

    #[getter]
    fn input_len(&self) -> usize {
        self.inner.input_len()
    }

    /// Class probabilities `(positive, negative)` for an input vector.
    fn probabilities(&self, x: Vec<f64>) -> PyResult<(f64, f64)> {
        self.check_input(&x)?;
        let p = self.inner.forward(&x);
        Ok((p[0], p[1]))
    }

    /// `"positive"` or `"negative"` for an input vector; ties go positive.
    fn predict(&self, x: Vec<f64>) -> PyResult<String> {
        self.check_input(&x)?;
        Ok(self.inner.predict(&x).to_string())
    }

    /// Trains on vectors and `"pos"`/`"neg"` labels; returns the per-epoch
    /// mean training loss.
    #[pyo3(signature = (xs, ys, epochs = 200, batch_size = 32, learning_rate = 1e-3))]
    fn train(
        &mut self,
        xs: Vec<Vec<f64>>,
        ys: Vec<String>,
        epochs: usize,
        batch_size: usize,
        learning_rate: f64,
    ) -> PyResult<Vec<f64>> {
        let classes: Vec<usize> = ys
            .iter()
            .map(|label| parse_label(label).map(|l| matches!(l, depsent::Label::Neg) as usize))
            .collect::<PyResult<_>>()?;
        let opts = depsent::TrainOptions {
            epochs,
            batch_size,
            learning_rate,
            patience: None,
        };
        let history = self
            .inner
            .train(&xs, &classes, None, &opts)
            .map_err(value_err)?;
        Ok(history.train)
    }
}

impl FallbackModel {
    fn check_input(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.inner.input_len() {
            return Err(PyValueError::new_err(format!(
                "input has {} values, the model expects {}",
                x.len(),
                self.inner.input_len()
            )));
        }
        Ok(())
    }
}

/// Splits text on whitespace, keeping emoticons as their own tokens.
#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    ingest::tokenize(text, &ingest::EmojiTable::default())
}

/// Canonical form of one token under the built-in variant map.
#[pyfunction]
fn normalize(token: &str) -> String {
    depsent::Normalizer::with_default_map().normalize(token)
}

/// Parses dependency-parsed sentences from `ID FORM POS HEAD DEPREL` blocks.
#[pyfunction]
#[pyo3(signature = (text, normalizer = None))]
fn parse_conll(text: &str, normalizer: Option<&Normalizer>) -> PyResult<Vec<Sentence>> {
    let default;
    let norm = match normalizer {
        Some(n) => &n.inner,
        None => {
            default = depsent::Normalizer::with_default_map();
            &default
        }
    };
    let sentences = ingest::parse_conll(text, norm, &ingest::EmojiTable::default())
        .map_err(value_err)?;
    Ok(sentences.into_iter().map(|inner| Sentence { inner }).collect())
}

/// Reads and parses a tree file.
#[pyfunction]
#[pyo3(signature = (path, normalizer = None))]
fn load_conll(path: PathBuf, normalizer: Option<&Normalizer>) -> PyResult<Vec<Sentence>> {
    let text = std::fs::read_to_string(&path).map_err(value_err)?;
    parse_conll(&text, normalizer)
}

/// Reads a labelled corpus; returns `(label, text)` pairs.
#[pyfunction]
fn load_corpus(path: PathBuf) -> PyResult<Vec<(String, String)>> {
    let corpus = ingest::load_corpus(&path).map_err(value_err)?;
    Ok(corpus
        .records
        .into_iter()
        .map(|(label, text)| (label.to_string(), text))
        .collect())
}

fn config_or_default(config: Option<&RuleConfig>) -> depsent::RuleConfig {
    match config {
        Some(c) => c.inner.clone(),
        None => depsent::RuleConfig::default(),
    }
}

/// Runs the rule engine on one sentence after assigning lexicon strengths.
#[pyfunction]
#[pyo3(signature = (sentence, lexicon, config = None))]
fn classify(
    sentence: &Sentence,
    lexicon: &Lexicon,
    config: Option<&RuleConfig>,
) -> Outcome {
    let cfg = config_or_default(config);
    let scored = lexicon.inner.assign_strengths(&sentence.inner);
    let outcome = depsent::classify_rules(&scored, &cfg);
    Outcome {
        polarity: outcome.polarity.to_string(),
        steps: outcome.trace.iter().map(ToString::to_string).collect(),
    }
}

/// Rules first, fallback network on an undecided sentence.
/// Returns `(polarity, provenance)` with provenance `"rule"` or `"fallback"`.
#[pyfunction]
#[pyo3(signature = (sentence, lexicon, model, embeddings, config = None))]
fn hybrid_classify(
    sentence: &Sentence,
    lexicon: &Lexicon,
    model: &FallbackModel,
    embeddings: &EmbeddingTable,
    config: Option<&RuleConfig>,
) -> (String, String) {
    let cfg = config_or_default(config);
    let (polarity, provenance) = harness::hybrid_classify(
        &sentence.inner,
        &lexicon.inner,
        &cfg,
        &model.inner,
        &embeddings.inner,
    );
    (polarity.to_string(), provenance.to_string())
}

fn report_to_dict<'py>(
    py: Python<'py>,
    report: &harness::EvalReport,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("tp", report.confusion.true_pos)?;
    d.set_item("fp", report.confusion.false_pos)?;
    d.set_item("fn", report.confusion.false_neg)?;
    d.set_item("tn", report.confusion.true_neg)?;
    d.set_item("precision", report.metrics.precision)?;
    d.set_item("recall", report.metrics.recall)?;
    d.set_item("f_measure", report.metrics.f_measure)?;
    d.set_item("accuracy", report.metrics.accuracy)?;
    d.set_item("unclassified_rate", report.unclassified_rate)?;
    if let Some(rate) = report.fallback_pos_rate {
        d.set_item("fallback_pos_rate", rate)?;
    }
    if let Some(rate) = report.fallback_neg_rate {
        d.set_item("fallback_neg_rate", rate)?;
    }
    Ok(d)
}

fn unwrap_inputs(
    py: Python<'_>,
    sentences: &[Py<Sentence>],
    labels: &[String],
) -> PyResult<(Vec<depsent::DepSentence>, Vec<depsent::Label>)> {
    let sentences: Vec<depsent::DepSentence> = sentences
        .iter()
        .map(|s| s.borrow(py).inner.clone())
        .collect();
    let labels: Vec<depsent::Label> = labels
        .iter()
        .map(|l| parse_label(l))
        .collect::<PyResult<_>>()?;
    Ok((sentences, labels))
}

/// Scores the rule engine on a labelled set; undecided sentences count as
/// positive. Returns the confusion counts and metrics as a dict.
#[pyfunction]
#[pyo3(signature = (sentences, labels, lexicon, config = None))]
fn evaluate_rules<'py>(
    py: Python<'py>,
    sentences: Vec<Py<Sentence>>,
    labels: Vec<String>,
    lexicon: &Lexicon,
    config: Option<&RuleConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let (sentences, labels) = unwrap_inputs(py, &sentences, &labels)?;
    let cfg = config_or_default(config);
    let report = harness::evaluate_rules_only(&sentences, &labels, &lexicon.inner, &cfg)
        .map_err(value_err)?;
    report_to_dict(py, &report)
}

/// Scores the hybrid classifier on a labelled set. The dict additionally
/// carries the fallback routing rates per gold label.
#[pyfunction]
#[pyo3(signature = (sentences, labels, lexicon, model, embeddings, config = None))]
fn evaluate_hybrid<'py>(
    py: Python<'py>,
    sentences: Vec<Py<Sentence>>,
    labels: Vec<String>,
    lexicon: &Lexicon,
    model: &FallbackModel,
    embeddings: &EmbeddingTable,
    config: Option<&RuleConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let (sentences, labels) = unwrap_inputs(py, &sentences, &labels)?;
    let cfg = config_or_default(config);
    let report = harness::evaluate_hybrid(
        &sentences,
        &labels,
        &lexicon.inner,
        &cfg,
        &model.inner,
        &embeddings.inner,
    )
    .map_err(value_err)?;
    report_to_dict(py, &report)
}

#[pymodule]
fn depsent_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Normalizer>()?;
    m.add_class::<Sentence>()?;
    m.add_class::<Lexicon>()?;
    m.add_class::<RuleConfig>()?;
    m.add_class::<Outcome>()?;
    m.add_class::<EmbeddingTable>()?;
    m.add_class::<FallbackModel>()?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(parse_conll, m)?)?;
    m.add_function(wrap_pyfunction!(load_conll, m)?)?;
    m.add_function(wrap_pyfunction!(load_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_classify, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_rules, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_hybrid, m)?)?;
    Ok(())
}
