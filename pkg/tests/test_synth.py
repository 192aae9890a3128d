import os

import pytest

from argdissect.corpus import ATTACK, SUPPORT, build_instances
from argdissect.pipeline import load_corpus_dir
from argdissect.synth import (
    MARKERS,
    SIGNAL_WORDS,
    SynthConfig,
    generate_corpus,
)


def test_generate_corpus_writes_all_layers(tmp_path):
    out = tmp_path / "c"
    doc_ids = generate_corpus(str(out), SynthConfig(n_docs=3, seed=1))
    assert len(doc_ids) == 3
    for doc_id in doc_ids:
        for ext in ("txt", "ann", "tokens.tsv", "trees", "discourse"):
            assert (out / f"{doc_id}.{ext}").exists()
    assert (out / "split.tsv").exists()
    assert (out / "embeddings.txt").exists()


def test_generated_corpus_loads_cleanly(tmp_path):
    out = tmp_path / "c"
    generate_corpus(str(out), SynthConfig(n_docs=4, seed=2))
    bundle = load_corpus_dir(str(out), embeddings_path=str(out / "embeddings.txt"))
    assert bundle.layers == frozenset(
        {"tokens", "trees", "sentiment", "discourse", "embeddings"}
    )
    assert len(bundle.bundles) == 4


def test_generation_is_seed_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    generate_corpus(str(a), SynthConfig(n_docs=3, seed=9))
    generate_corpus(str(b), SynthConfig(n_docs=3, seed=9))
    for name in sorted(os.listdir(a)):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_split_share(tmp_path):
    out = tmp_path / "c"
    generate_corpus(str(out), SynthConfig(n_docs=10, train_share=0.8, seed=0))
    lines = (out / "split.tsv").read_text().strip().split("\n")
    parts = [ln.split("\t")[1] for ln in lines]
    assert parts.count("train") == 8
    assert parts.count("test") == 2


def test_marker_agreement_tracks_config(tmp_path):
    out = tmp_path / "c"
    config = SynthConfig(n_docs=60, marker_signal=0.95, seed=3)
    generate_corpus(str(out), config)
    bundle = load_corpus_dir(str(out))
    instances = build_instances(bundle.corpus, "f")
    agree = total = 0
    for inst in instances:
        doc = bundle.bundles[inst.doc_id]
        eau = doc.parsed.eau_by_id(inst.source)
        # the discourse marker opens the source EAU's sentence
        sentence_tokens = [
            t
            for t in doc.tokens
            if t.start < eau.end and t.end > eau.start
        ]
        s_idx = sentence_tokens[0].sentence_idx
        marker = next(
            t.surface for t in doc.tokens if t.sentence_idx == s_idx
        ).lower()
        expected = MARKERS[inst.label]
        total += 1
        agree += int(marker == expected)
    assert total > 100
    assert agree / total == pytest.approx(0.95, abs=0.05)


def test_content_agreement_tracks_config(tmp_path):
    out = tmp_path / "c"
    config = SynthConfig(n_docs=60, content_signal=0.75, seed=5)
    generate_corpus(str(out), config)
    bundle = load_corpus_dir(str(out))
    instances = build_instances(bundle.corpus, "f")
    agree = total = 0
    for inst in instances:
        doc = bundle.bundles[inst.doc_id]
        eau = doc.parsed.eau_by_id(inst.source)
        first_word = doc.parsed.document.text[eau.start : eau.end].split()[0]
        total += 1
        agree += int(first_word == SIGNAL_WORDS[inst.label])
    assert agree / total == pytest.approx(0.75, abs=0.07)


def test_both_labels_present(tmp_path):
    out = tmp_path / "c"
    generate_corpus(str(out), SynthConfig(n_docs=20, seed=11))
    bundle = load_corpus_dir(str(out))
    labels = {i.label for i in build_instances(bundle.corpus, "f")}
    assert labels == {SUPPORT, ATTACK}
