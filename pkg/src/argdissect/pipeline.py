"""Corpus loading, instance-view construction, and experiment orchestration.

A corpus directory holds, per document: ``<id>.txt``, ``<id>.ann``, and
optionally ``<id>.tokens.tsv``, ``<id>.trees``, ``<id>.discourse``; plus a
corpus-level split file and embedding table.  ``run_experiment`` wires
ingest -> align -> registry freeze -> extract -> train -> evaluate and
writes a manifest with content hashes so runs are reproducible.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import corpus as corpus_mod
from .annotations import (
    ConstTree,
    DiscourseRelation,
    EmbeddingTable,
    Token,
    align_eau,
    load_embeddings,
    parse_discourse_file,
    parse_token_offsets,
    parse_trees_file,
)
from .corpus import (
    Corpus,
    CorpusSplit,
    EauSpan,
    PairingConfig,
    ParsedDoc,
    RelationInstance,
    TASK_CLASSES,
    parse_standoff,
    split_corpus,
)
from .errors import DataError, MissingLayerError
from .evaluation import EvalReport, f1_report, mfs_baseline, significance
from .features import (
    FA,
    ContentLayers,
    ContextLayers,
    FeatureRegistry,
    InstanceView,
    SideView,
    assemble,
    count_punct,
)
from .learn import LinearModel, TrainConfig, predict_all, save_model, train
from .treeops import content_rules, context_rules, crossing_rules, cut_tree, select_sentiment_nodes


@dataclass
class DocBundle:
    parsed: ParsedDoc
    tokens: list[Token]
    trees: Optional[dict[int, ConstTree]] = None
    discourse: Optional[list[DiscourseRelation]] = None


@dataclass
class CorpusBundle:
    corpus: Corpus
    bundles: dict[str, DocBundle]
    embeddings: Optional[EmbeddingTable] = None

    @property
    def layers(self) -> frozenset[str]:
        layers = {"tokens"}
        if all(b.trees is not None for b in self.bundles.values()):
            layers.add("trees")
            if all(
                t.has_sentiment
                for b in self.bundles.values()
                for t in b.trees.values()
            ):
                layers.add("sentiment")
        if all(b.discourse is not None for b in self.bundles.values()):
            layers.add("discourse")
        if self.embeddings is not None:
            layers.add("embeddings")
        return frozenset(layers)


def _read(path) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def load_corpus_dir(corpus_dir, embeddings_path=None, embedding_dim=None) -> CorpusBundle:
    """Load every ``<id>.txt``/``<id>.ann`` pair and whatever layers exist."""
    doc_ids = sorted(
        f.removesuffix(".txt")
        for f in os.listdir(corpus_dir)
        if f.endswith(".txt") and os.path.exists(
            os.path.join(corpus_dir, f.removesuffix(".txt") + ".ann")
        )
    )
    if not doc_ids:
        raise DataError(f"no <id>.txt / <id>.ann pairs found in {corpus_dir}")
    corpus = Corpus()
    bundles = {}
    for doc_id in doc_ids:
        base = os.path.join(corpus_dir, doc_id)
        parsed = parse_standoff(_read(base + ".txt"), _read(base + ".ann"), doc_id)
        corpus.add(parsed)
        text = parsed.document.text
        tokens_path = base + ".tokens.tsv"
        if not os.path.exists(tokens_path):
            raise MissingLayerError(f"tokens ({tokens_path})")
        tokens = parse_token_offsets(_read(tokens_path), text, doc_id)
        trees = None
        if os.path.exists(base + ".trees"):
            trees = parse_trees_file(_read(base + ".trees"), tokens, doc_id)
        discourse = None
        if os.path.exists(base + ".discourse"):
            discourse = parse_discourse_file(
                _read(base + ".discourse"), len(text), doc_id
            )
        bundles[doc_id] = DocBundle(
            parsed=parsed, tokens=tokens, trees=trees, discourse=discourse
        )
    embeddings = None
    if embeddings_path:
        if embedding_dim is None:
            with open(embeddings_path) as fh:
                first = fh.readline().split(" ")
            embedding_dim = len(first) - 1
        embeddings = load_embeddings(_read(embeddings_path), embedding_dim)
    return CorpusBundle(corpus=corpus, bundles=bundles, embeddings=embeddings)


def _span_inside(span, container) -> bool:
    return container[0] <= span[0] and span[1] <= container[1]


def _span_intersects(span, container) -> bool:
    return span[0] < container[1] and container[0] < span[1]


def _paragraph_stats(parsed: ParsedDoc, eau: EauSpan):
    doc = parsed.document
    par_idx = None
    for i, (start, end) in enumerate(doc.paragraph_spans):
        if start <= eau.start < end:
            par_idx = i
            break
    if par_idx is None:
        raise DataError(f"{doc.id}: EAU {eau.id} outside every paragraph")
    units = [e for e in parsed.eaus if doc.paragraph_spans[par_idx][0] <= e.start < doc.paragraph_spans[par_idx][1]]
    unit_index = units.index(eau)
    return par_idx, unit_index, unit_index == 0, unit_index == len(units) - 1


def build_side_view(
    bundle: DocBundle, eau: EauSpan, embeddings: Optional[EmbeddingTable]
) -> SideView:
    """Compute the content and context layers for one EAU."""
    alignment = align_eau(eau, bundle.tokens)
    eau_surfaces = tuple(t.surface for t in alignment.eau_tokens)
    ctx_surfaces = tuple(t.surface for t in alignment.context_tokens)

    first = alignment.eau_tokens[0]
    last = alignment.eau_tokens[-1]
    preceding = sum(
        1
        for t in alignment.context_tokens
        if (t.sentence_idx, t.token_idx) < (first.sentence_idx, first.token_idx)
    )
    following = len(alignment.context_tokens) - preceding

    par_idx, unit_index, is_first, is_last = _paragraph_stats(bundle.parsed, eau)

    c_rules: list[str] = []
    x_rules: list[str] = []
    cross: list[str] = []
    sent_cb = sent_ci = sent_fa = None
    if bundle.trees is not None:
        for k, s_idx in enumerate(alignment.covering_sentence_idxs):
            tree = bundle.trees[s_idx]
            in_sent = [
                t.token_idx for t in alignment.eau_tokens if t.sentence_idx == s_idx
            ]
            rng = (min(in_sent), max(in_sent) + 1)
            cut = cut_tree(tree, rng)
            c_rules.extend(sorted(content_rules(cut).elements()))
            x_rules.extend(sorted(context_rules(cut).elements()))
            cross.extend(sorted(crossing_rules(cut).elements()))
            if k == 0 and tree.has_sentiment:
                nodes = select_sentiment_nodes(tree, rng)
                sent_cb = nodes["cb"].sentiment if nodes["cb"] else None
                sent_ci = nodes["ci"].sentiment if nodes["ci"] else None
                sent_fa = nodes["fa"].sentiment if nodes["fa"] else None

    cb_disc: list[tuple[str, str]] = []
    ci_disc: list[tuple[str, str]] = []
    fa_disc: list[tuple[str, str]] = []
    if bundle.discourse is not None:
        sent_tokens = [
            t
            for t in bundle.tokens
            if t.sentence_idx in alignment.covering_sentence_idxs
        ]
        region = (min(t.start for t in sent_tokens), max(t.end for t in sent_tokens))
        eau_span = (eau.start, eau.end)
        for rel in bundle.discourse:
            if not (
                _span_intersects(rel.arg1, region) or _span_intersects(rel.arg2, region)
            ):
                continue
            pair = (rel.kind, rel.sense)
            if _span_inside(rel.arg1, eau_span) and _span_inside(rel.arg2, eau_span):
                cb_disc.append(pair)
            elif (
                _span_inside(rel.arg1, region)
                and _span_inside(rel.arg2, region)
                and not _span_intersects(rel.arg1, eau_span)
                and not _span_intersects(rel.arg2, eau_span)
            ):
                ci_disc.append(pair)
            else:
                fa_disc.append(pair)

    emb_content = emb_context = None
    if embeddings is not None:
        emb_content = sum(
            (embeddings.lookup(w.lower()) for w in eau_surfaces),
            start=np.zeros(embeddings.dimension),
        )
        emb_context = sum(
            (embeddings.lookup(w.lower()) for w in ctx_surfaces),
            start=np.zeros(embeddings.dimension),
        )

    content = ContentLayers(
        tokens=eau_surfaces,
        rules=tuple(c_rules),
        discourse=tuple(cb_disc),
        sentiment=sent_cb,
        punct_count=count_punct(eau_surfaces),
        embedding=emb_content,
    )
    context = ContextLayers(
        tokens=ctx_surfaces,
        rules=tuple(x_rules),
        crossing_rules=tuple(cross),
        discourse=tuple(ci_disc),
        crossing_discourse=tuple(fa_disc),
        sentiment_ci=sent_ci,
        sentiment_fa=sent_fa,
        preceding_count=preceding,
        following_count=following,
        unit_index=unit_index,
        is_first=is_first,
        is_last=is_last,
        paragraph_index=par_idx,
        embedding=emb_context,
    )
    return SideView(eau_id=eau.id, content=content, context=context)


def build_views(
    bundle: CorpusBundle, instances: list[RelationInstance]
) -> list[InstanceView]:
    """Instance views for a batch of instances, with per-EAU side caching."""
    layers = bundle.layers
    cache: dict[tuple[str, str], SideView] = {}

    def side(doc_id: str, eau_id: str) -> SideView:
        key = (doc_id, eau_id)
        if key not in cache:
            doc_bundle = bundle.bundles[doc_id]
            eau = doc_bundle.parsed.eau_by_id(eau_id)
            cache[key] = build_side_view(doc_bundle, eau, bundle.embeddings)
        return cache[key]

    views = []
    for inst in instances:
        source = side(inst.doc_id, inst.source)
        target = side(inst.doc_id, inst.target) if inst.target else None
        views.append(
            InstanceView(instance=inst, source=source, target=target, layers=layers)
        )
    return views


# --------------------------------------------------------------------------
# Experiment driver


@dataclass
class RunConfig:
    corpus_dir: str = ""
    embeddings_path: str = ""
    split_path: str = ""
    output_dir: str = "out"
    task: str = "f"
    model_type: str = FA
    families: tuple[str, ...] = ()  # empty = all available
    pairing_scope: str = "paragraph"
    exclude_reverse: bool = False
    train: TrainConfig = field(default_factory=TrainConfig)
    eval_seed: int = 0
    significance_n: int = 0  # 0 disables significance testing

    def pairing(self) -> PairingConfig:
        return PairingConfig(scope=self.pairing_scope, exclude_reverse=self.exclude_reverse)


@dataclass
class ExperimentData:
    bundle: CorpusBundle
    split: CorpusSplit
    train_instances: list[RelationInstance]
    test_instances: list[RelationInstance]
    train_views: list[InstanceView]
    test_views: list[InstanceView]
    classes: tuple[str, ...]
    embedding_dim: int


def prepare(config: RunConfig) -> ExperimentData:
    bundle = load_corpus_dir(
        config.corpus_dir, config.embeddings_path or None
    )
    split = split_corpus(bundle.corpus, _read(config.split_path))
    all_instances = corpus_mod.build_instances(
        bundle.corpus, config.task, config.pairing()
    )
    train_instances = [
        i for i in all_instances if i.doc_id in split.train_doc_ids
    ]
    test_instances = [i for i in all_instances if i.doc_id in split.test_doc_ids]
    if not train_instances or not test_instances:
        raise DataError("empty train or test instance set")
    dim = bundle.embeddings.dimension if bundle.embeddings else 0
    return ExperimentData(
        bundle=bundle,
        split=split,
        train_instances=train_instances,
        test_instances=test_instances,
        train_views=build_views(bundle, train_instances),
        test_views=build_views(bundle, test_instances),
        classes=TASK_CLASSES[config.task],
        embedding_dim=dim,
    )


def resolve_families(config: RunConfig, data: ExperimentData) -> tuple[str, ...]:
    from .features import default_families

    if not config.families:
        return default_families(data.train_views[0])
    layer_needs = {
        "syntactic": "trees",
        "discourse": "discourse",
        "embedding": "embeddings",
        "sentiment": "sentiment",
    }
    for family in config.families:
        needed = layer_needs.get(family)
        if needed and needed not in data.bundle.layers:
            raise MissingLayerError(f"{needed} (required by {family} features)")
    return tuple(config.families)


def train_model(
    config: RunConfig, data: ExperimentData, model_type: str | None = None
) -> tuple[LinearModel, FeatureRegistry, list, tuple[str, ...]]:
    """Registry construction + training; returns (model, registry, X_train, families)."""
    model_type = model_type or config.model_type
    families = resolve_families(config, data)
    registry = FeatureRegistry()
    X_train = [
        assemble(v, model_type, registry, families, data.embedding_dim)
        for v in data.train_views
    ]
    registry.freeze()
    y_train = [v.instance.label for v in data.train_views]
    model = train(
        X_train,
        y_train,
        config.train,
        registry,
        data.classes,
        model_type=model_type,
        task=config.task,
    )
    return model, registry, X_train, families


def evaluate_model(
    model: LinearModel,
    registry: FeatureRegistry,
    views: list[InstanceView],
    classes,
    families,
    embedding_dim: int,
) -> tuple[EvalReport, list[str]]:
    X = [
        assemble(v, model.model_type, registry, families, embedding_dim)
        for v in views
    ]
    preds = predict_all(model, X)
    gold = [v.instance.label for v in views]
    return f1_report(preds, gold, classes), preds


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, config: RunConfig, inputs: list[str], outputs: list[str]) -> None:
    lines = []
    cfg = config.train
    for key, value in (
        ("corpus_dir", config.corpus_dir),
        ("embeddings_path", config.embeddings_path),
        ("split_path", config.split_path),
        ("task", config.task),
        ("model_type", config.model_type),
        ("families", ",".join(config.families) or "auto"),
        ("pairing_scope", config.pairing_scope),
        ("exclude_reverse", config.exclude_reverse),
        ("svm_c", cfg.c),
        ("svm_loss", cfg.loss),
        ("svm_max_epochs", cfg.max_epochs),
        ("svm_tolerance", cfg.tolerance),
        ("svm_class_weighting", cfg.class_weighting),
        ("svm_seed", cfg.seed),
        ("eval_seed", config.eval_seed),
    ):
        lines.append(f"{key} = {value}")
    for path_in in sorted(inputs):
        if os.path.isfile(path_in):
            lines.append(f"input {path_in} sha256={_sha256_file(path_in)}")
    for path_out in outputs:
        if os.path.isfile(path_out):
            lines.append(f"output {path_out} sha256={_sha256_file(path_out)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report_tsv(path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for section, key, value in report.as_rows():
            fh.write(f"{section}\t{key}\t{value}\n")
        for note in report.notes:
            fh.write(f"note\t-\t{note}\n")


def run_experiment(config: RunConfig) -> EvalReport:
    """Full ingest -> train -> evaluate run with artifacts in the output dir."""
    os.makedirs(config.output_dir, exist_ok=True)
    data = prepare(config)
    model, registry, _, families = train_model(config, data)
    report, preds = evaluate_model(
        model, registry, data.test_views, data.classes, families, data.embedding_dim
    )

    if config.significance_n:
        mfs_label = mfs_baseline(
            [v.instance.label for v in data.train_views], data.classes
        )
        gold = [v.instance.label for v in data.test_views]
        baseline_preds = [mfs_label] * len(gold)
        p = significance(
            preds,
            baseline_preds,
            gold,
            data.classes,
            n=config.significance_n,
            seed=config.eval_seed,
        )
        report.significance.append(
            {
                "baseline": "mfs",
                "p": p,
                "n_permutations": config.significance_n,
                "seed": config.eval_seed,
            }
        )

    model_path = os.path.join(config.output_dir, "model.txt")
    report_path = os.path.join(config.output_dir, "report.tsv")
    manifest_path = os.path.join(config.output_dir, "manifest.txt")
    save_model(model, model_path)
    write_report_tsv(report_path, report)
    inputs = [config.split_path]
    if config.embeddings_path:
        inputs.append(config.embeddings_path)
    write_manifest(manifest_path, config, inputs, [model_path, report_path])
    return report
