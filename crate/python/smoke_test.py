#!/usr/bin/env python3
"""Smoke test for the depsent_py extension module.

Locates the compiled extension under target/ (building it if needed),
stages it under an importable name, and runs the full classification
pipeline over the bundled data files.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def stage_module(tmp: Path) -> None:
    candidates = [
        ROOT / "target" / "release" / "libdepsent_py.so",
        ROOT / "target" / "debug" / "libdepsent_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        subprocess.run(
            ["cargo", "build", "-p", "depsent-py", "--release"],
            cwd=ROOT,
            check=True,
        )
        built = candidates[0]
    shutil.copy2(built, tmp / "depsent_py.so")
    sys.path.insert(0, str(tmp))


def main() -> None:
    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        stage_module(tmp)
        import depsent_py as ds

        data = ROOT / "data"

        # Tokenization keeps emoticons; normalization canonicalizes variants.
        assert ds.tokenize("خوب :)") == ["خوب", ":)"]
        assert ds.normalize("عالییییی") == "عالی"

        records = ds.load_corpus(data / "mini_corpus.tsv")
        sentences = ds.load_conll(data / "mini_trees.conll")
        assert len(records) == len(sentences) == 40
        labels = [label for label, _ in records]

        lexicon = ds.Lexicon.load(data / "lexicon.tsv")
        assert len(lexicon) == 34
        assert "عالی" in lexicon
        assert math.isclose(lexicon.strength("عالی"), 0.9)
        assert lexicon.strength("ناشناخته") == 0.0

        config = ds.RuleConfig()
        assert config.max_sentence_len == 100
        assert len(ds.RuleConfig.rule_ids()) == 10
        assert config.is_enabled("polarity-inversion")

        outcome = ds.classify(sentences[0], lexicon, config)
        assert outcome.polarity == "positive"
        assert any("aggregate" in step for step in outcome.steps)

        report = ds.evaluate_rules(sentences, labels, lexicon)
        assert (report["tp"], report["fp"], report["fn"], report["tn"]) == (20, 1, 0, 19)
        assert math.isclose(report["accuracy"], 0.975)
        assert math.isclose(report["unclassified_rate"], 0.075)

        table = ds.EmbeddingTable.load(data / "embeddings.vec")
        assert table.dim() == 4 and len(table) == 12

        neutral = ds.FallbackModel.zeroed(50, table.dim(), 8)
        hybrid = ds.evaluate_hybrid(sentences, labels, lexicon, neutral, table)
        assert (hybrid["tp"], hybrid["fp"], hybrid["fn"], hybrid["tn"]) == (20, 1, 0, 19)
        assert math.isclose(hybrid["fallback_pos_rate"], 0.1)
        assert math.isclose(hybrid["fallback_neg_rate"], 0.05)

        polarity, provenance = ds.hybrid_classify(sentences[0], lexicon, neutral, table)
        assert (polarity, provenance) == ("positive", "rule")

        # Train a tiny model on the sentence vectors and round-trip it.
        model = ds.FallbackModel(12, table.dim(), 8, seed=42)
        xs = [table.vectorize(s, 12) for s in sentences]
        losses = model.train(xs, labels, epochs=5)
        assert len(losses) == 5 and all(math.isfinite(l) for l in losses)

        saved = tmp / "model.bin"
        model.save(saved)
        again = ds.FallbackModel.load(saved)
        assert again.input_len == model.input_len
        for x in xs[:5]:
            assert again.predict(x) == model.predict(x)
            positive, negative = again.probabilities(x)
            assert math.isclose(positive + negative, 1.0, abs_tol=1e-6)

        print("smoke test passed: 40 sentences, rules accuracy 0.975, hybrid pipeline OK")


if __name__ == "__main__":
    main()
