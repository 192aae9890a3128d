"""Acceptance suite: one test per release criterion, with stated tolerances."""

import os
import time

import numpy as np
import pytest

from argdissect.corpus import parse_standoff, transform_doc
from argdissect.evaluation import (
    anova_scores,
    f1_report,
    randomize_contexts,
    significance,
    strip_contexts,
)
from argdissect.features import CB, CI, FeatureRegistry
from argdissect.learn import TrainConfig, load_model, predict_all, save_model, train
from argdissect.pipeline import (
    RunConfig,
    evaluate_model,
    prepare,
    train_model,
)
from argdissect.synth import SynthConfig, generate_corpus
from argdissect.treeops import context_rules, cut_tree
from argdissect.cli import main as cli_main

from conftest import SMOKE_EAU_TOKENS, random_tree


def report_pass(criterion: str) -> None:
    print(f"PASS: {criterion}")


@pytest.fixture(scope="module")
def planted_corpus(tmp_path_factory):
    """200-document synthetic corpus with the documented signal strengths."""
    out = str(tmp_path_factory.mktemp("planted") / "corpus")
    generate_corpus(
        out,
        SynthConfig(n_docs=200, marker_signal=0.95, content_signal=0.75, seed=0),
    )
    return out


def planted_config(corpus_dir, model_type):
    return RunConfig(
        corpus_dir=corpus_dir,
        split_path=os.path.join(corpus_dir, "split.tsv"),
        output_dir="unused",
        task="f",
        model_type=model_type,
        train=TrainConfig(max_epochs=300, tolerance=1e-3),
    )


def test_criterion_1_mfs_arithmetic():
    start = time.time()
    gold2 = ["support"] * 1021 + ["attack"] * 92
    report2 = f1_report(["support"] * len(gold2), gold2, ("support", "attack"))
    assert report2.f1("support") == pytest.approx(95.7, abs=0.05)
    assert report2.macro_f1 == pytest.approx(47.8, abs=0.05)

    gold3 = ["support"] * 1021 + ["attack"] * 92 + ["none"] * 1622
    report3 = f1_report(
        ["none"] * len(gold3), gold3, ("support", "attack", "none")
    )
    assert report3.f1("none") == pytest.approx(74.5, abs=0.05)
    assert time.time() - start < 1.0
    report_pass("criterion 1: most-frequent-class F1 arithmetic")


def test_criterion_2_cb_context_invariance(planted_corpus):
    start = time.time()
    config = planted_config(planted_corpus, CB)
    data = prepare(config)
    model, registry, _, families = train_model(config, data)

    def preds(views):
        _, p = evaluate_model(
            model, registry, views, data.classes, families, data.embedding_dim
        )
        return p

    identity = preds(data.test_views)
    for seed in range(5):
        assert preds(randomize_contexts(data.test_views, seed)) == identity
    assert preds(strip_contexts(data.test_views)) == identity
    assert time.time() - start < 30.0
    report_pass("criterion 2: CB predictions invariant to context transforms")


def test_criterion_3_planted_signal_direction(planted_corpus):
    start = time.time()
    reports = {}
    for model_type in (CB, CI):
        config = planted_config(planted_corpus, model_type)
        data = prepare(config)
        model, registry, _, families = train_model(config, data)
        standard, _ = evaluate_model(
            model, registry, data.test_views, data.classes, families,
            data.embedding_dim,
        )
        randomized, _ = evaluate_model(
            model, registry, randomize_contexts(data.test_views, seed=0),
            data.classes, families, data.embedding_dim,
        )
        reports[model_type] = (standard.macro_f1, randomized.macro_f1)

    assert reports[CI][0] > reports[CB][0]
    assert reports[CI][1] < reports[CB][1]
    assert reports[CI][0] - reports[CI][1] >= 10.0
    assert time.time() - start < 120.0
    report_pass("criterion 3: planted context signal dominates, then collapses")


def test_criterion_4_tree_cut_correctness(smoke_tree):
    start = time.time()
    cut = cut_tree(smoke_tree, SMOKE_EAU_TOKENS)
    ci_bag = context_rules(cut)
    assert "ADVP→however" in ci_bag
    assert set(ci_bag) == {"ADVP→however", ",→,", ".→."}

    rng = np.random.default_rng(101)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(2, 12))
        tree = random_tree(rng, n)
        lo = int(rng.integers(0, n))
        hi = int(rng.integers(lo + 1, n + 1))
        cut = cut_tree(tree, (lo, hi))
        content_idx = set()
        for root in cut.content_roots:
            content_idx.update(
                leaf.token_start for leaf in root.leaves()
            )
        context_idx = set()

        def collect(node):
            from argdissect.treeops import CutMarker

            if isinstance(node, CutMarker):
                return
            if getattr(node, "is_leaf", False):
                context_idx.add(node.token_start)
                return
            for c in node.children:
                collect(c)

        for root in cut.context_forest:
            collect(root)
        assert content_idx == set(range(lo, hi))
        assert context_idx == set(range(n)) - content_idx
        checked += 1
    assert time.time() - start < 10.0
    report_pass("criterion 4: tree cut rule bags and leaf partition")


def test_criterion_5_learner_sanity():
    start = time.time()
    rng = np.random.default_rng(7)
    points = rng.normal(size=(100, 2)) + np.where(
        np.arange(100)[:, None] < 50, [2.5, 0.0], [-2.5, 0.0]
    )
    labels = ["a"] * 50 + ["b"] * 50
    vectors = [{0: float(p[0]), 1: float(p[1])} for p in points]
    reg = FeatureRegistry()
    reg.index("lex:eau:src:x0")
    reg.index("lex:eau:src:x1")
    reg.freeze()

    m1 = train(vectors, labels, TrainConfig(seed=1), reg, ("a", "b"))
    assert predict_all(m1, vectors) == labels
    duals = m1.dual_objectives["a"]
    assert all(b >= a - 1e-9 for a, b in zip(duals, duals[1:]))

    m2 = train(vectors, labels, TrainConfig(seed=1), reg, ("a", "b"))
    assert np.array_equal(m1.weights["a"], m2.weights["a"])
    assert m1.biases["a"] == m2.biases["a"]
    assert time.time() - start < 5.0
    report_pass("criterion 5: learner separates, converges monotonically, reruns bit-identically")


def test_criterion_6_anova_oracle():
    start = time.time()
    rng = np.random.default_rng(19)
    for _ in range(50):
        n_per = int(rng.integers(3, 9))
        k = int(rng.integers(2, 4))
        d = int(rng.integers(1, 6))
        X = rng.normal(size=(n_per * k, d))
        labels = [f"c{i}" for i in range(k) for _ in range(n_per)]

        reg = FeatureRegistry()
        for j in range(d):
            reg.index(f"lex:eau:src:w{j}")
        reg.freeze()
        vectors = [
            {j: float(X[r, j]) for j in range(d)} for r in range(X.shape[0])
        ]
        curve = anova_scores(vectors, labels, reg)

        # scalar brute-force oracle
        n = X.shape[0]
        for j in range(d):
            grand = sum(X[:, j]) / n
            ssb = ssw = 0.0
            for c in sorted(set(labels)):
                vals = [X[r, j] for r in range(n) if labels[r] == c]
                mean_c = sum(vals) / len(vals)
                ssb += len(vals) * (mean_c - grand) ** 2
                ssw += sum((v - mean_c) ** 2 for v in vals)
            expected = (ssb / (k - 1)) / (ssw / (n - k))
            assert curve.f_scores[j] == pytest.approx(expected, abs=1e-9)
    assert time.time() - start < 5.0
    report_pass("criterion 6: ANOVA F scores match the brute-force oracle")


def test_criterion_7_significance_calibration():
    start = time.time()
    gold = ["a", "b"] * 50
    preds = ["a", "a"] * 50
    assert significance(preds, list(preds), gold, ("a", "b"), n=1000, seed=0) == 1.0

    gold = (["a", "b"] * 500)[:1000]
    perfect = list(gold)
    wrong = ["b" if g == "a" else "a" for g in gold]
    p = significance(perfect, wrong, gold, ("a", "b"), n=10000, seed=0)
    assert p < 0.005
    assert time.time() - start < 30.0
    report_pass("criterion 7: randomization test is calibrated at both extremes")


def test_criterion_8_round_trips(tmp_path):
    start = time.time()
    text = "Essay title\n\nTherefore, people should not smoke. However, smoking relaxes.\n"
    ann = (
        "T1\tClaim 24 47\tpeople should not smoke\n"
        "T2\tPremise 58 73\tsmoking relaxes\n"
        "R1\tsupports Arg1:T2 Arg2:T1\n"
    )
    parsed = parse_standoff(text, ann, "d")
    for mode in ("eau_only", "context_only"):
        new_text, new_ann = transform_doc(parsed, mode)
        reparsed = parse_standoff(new_text, new_ann, "d")
        assert len(reparsed.eaus) == len(parsed.eaus)
        assert set(reparsed.relations) == set(parsed.relations)

    rng = np.random.default_rng(31)
    rows = rng.normal(size=(100, 8))
    labels = ["a" if r[:4].sum() > r[4:].sum() else "b" for r in rows]
    vectors = [{j: float(v) for j, v in enumerate(r) if v != 0.0} for r in rows]
    reg = FeatureRegistry()
    for j in range(8):
        reg.index(f"lex:eau:src:w{j}")
    reg.freeze()
    model = train(vectors, labels, TrainConfig(seed=5), reg, ("a", "b"))
    path = tmp_path / "model.txt"
    save_model(model, path)
    loaded = load_model(path)
    assert predict_all(loaded, vectors) == predict_all(model, vectors)
    assert time.time() - start < 10.0
    report_pass("criterion 8: transform and model round trips preserve behavior")


REAL_CORPUS_ENV = "ARGDISSECT_REAL_CORPUS_CONFIG"


@pytest.mark.skipif(
    REAL_CORPUS_ENV not in os.environ,
    reason=f"set {REAL_CORPUS_ENV} to a config file pointing at the licensed "
    "corpus with parses and embeddings to run the replication harness",
)
def test_criterion_9_replication_harness(tmp_path, capsys):
    """Conditional, non-gating: full-corpus replication of the headline number."""
    out_dir = str(tmp_path / "out")
    code = cli_main(
        [
            "run",
            "--config", os.environ[REAL_CORPUS_ENV],
            "--task", "h",
            "--model-type", "FA",
            "--out", out_dir,
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    macro = next(
        float(line.split(":")[1]) for line in printed.splitlines()
        if line.startswith("macro F1:")
    )
    # stretch target; hyperparameters of the reference setup are unspecified
    assert macro == pytest.approx(69.3, abs=2.0)
    report_pass("criterion 9: full-corpus replication lands in the target band")
