//! Shared helpers for the integration-test suite: bundled-fixture loading
//! and a seeded generator of random, valid dependency sentences.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use depsent::ingest::{load_conll, load_corpus};
use depsent::{DepArc, DepSentence, EmojiTable, Label, Lexicon, Normalizer, RuleConfig, Token};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Path of a file in the repository-level `data/` directory.
pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("data")
        .join(name)
}

/// Path of a checked-in expected-output file under `tests/golden/`.
pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name)
}

/// The bundled mini corpus, loaded and aligned by ordinal.
pub struct Fixtures {
    pub sentences: Vec<DepSentence>,
    pub labels: Vec<Label>,
    pub lexicon: Lexicon,
    pub cfg: RuleConfig,
}

pub fn load_fixtures() -> Fixtures {
    let normalizer = Normalizer::with_default_map();
    let emoji = EmojiTable::default();
    let corpus = load_corpus(&data_path("mini_corpus.tsv")).expect("bundled corpus loads");
    let sentences = load_conll(&data_path("mini_trees.conll"), &normalizer, &emoji)
        .expect("bundled trees load");
    assert_eq!(
        corpus.records.len(),
        sentences.len(),
        "corpus and trees must align by ordinal"
    );
    let (lexicon, _) = Lexicon::load(&data_path("lexicon.tsv"), &normalizer)
        .expect("bundled lexicon loads");
    Fixtures {
        sentences,
        labels: corpus.records.iter().map(|(label, _)| *label).collect(),
        lexicon,
        cfg: RuleConfig::default(),
    }
}

/// Surfaces the generator draws from: neutral fillers plus every category of
/// rule trigger, so random sentences exercise splits and transforms.
const SURFACES: &[&str] = &[
    "خانه", "کتاب", "روز", "شهر", "کار", "راه", "آب", "نور", "خوب", "بد", "عالی", "قدیمی",
    "نیست", "نبود", "اما", "ولی", "که", "این", "مخالف", "با", "خوش", "بیکار",
];
const POS_TAGS: &[&str] = &["N", "AJ", "V", "ADV", "PRO", "P", "CONJ", "DET", "SUBR"];
const RELATIONS: &[&str] = &[
    "SBJ", "MOS", "OBJ", "NPOSTMOD", "NPREMOD", "MOZ", "ADV", "VCONJ", "NCL",
];

/// Generates a valid random sentence: sequential ids, every head pointing at
/// an earlier token (token 1 is the root), and strengths on the 1/16 grid so
/// strength sums are exact in binary floating point.
pub fn gen_sentence(rng: &mut ChaCha8Rng) -> DepSentence {
    let n = rng.random_range(2..=12);
    let mut tokens = Vec::with_capacity(n);
    let mut arcs = Vec::with_capacity(n);
    for i in 1..=n {
        let surface = SURFACES[rng.random_range(0..SURFACES.len())];
        let pos = POS_TAGS[rng.random_range(0..POS_TAGS.len())];
        let strength = if rng.random_bool(0.5) {
            0.0
        } else {
            rng.random_range(-16i32..=16) as f64 / 16.0
        };
        tokens.push(Token::new(i, surface, surface, pos).with_strength(strength));
        let head = if i == 1 { 0 } else { rng.random_range(1..i) };
        arcs.push(DepArc::new(
            i,
            head,
            RELATIONS[rng.random_range(0..RELATIONS.len())],
        ));
    }
    DepSentence::new(tokens, arcs, Vec::new()).expect("generated trees are valid")
}

/// Copy of `sentence` with every strength multiplied by `factor`.
///
/// Bypasses the `[-1, 1]` clamp of the public builder on purpose: scale
/// tests multiply by powers of two well above one.
pub fn scale_strengths(sentence: &DepSentence, factor: f64) -> DepSentence {
    let tokens: Vec<Token> = sentence
        .tokens()
        .iter()
        .map(|t| {
            let mut scaled = t.clone();
            scaled.strength *= factor;
            scaled
        })
        .collect();
    DepSentence::from_parts(tokens, sentence.arcs().to_vec(), sentence.emojis().to_vec())
}
