"""Metrics, significance testing, robustness transforms, and ANOVA scoring.

F1 values are reported on a 0..100 scale.  All randomized procedures are
reproducible from (inputs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ArgdissectError, DataError
from .features import CB, CI, EMPTY_CONTEXT, FeatureRegistry, InstanceView

ANOVA_INF_SENTINEL = 1e12


@dataclass
class ConfusionMatrix:
    classes: tuple[str, ...]
    counts: np.ndarray  # counts[gold, pred]

    @classmethod
    def from_predictions(cls, preds, gold, classes):
        idx = {c: i for i, c in enumerate(classes)}
        counts = np.zeros((len(classes), len(classes)), dtype=int)
        for p, g in zip(preds, gold):
            if p not in idx or g not in idx:
                raise DataError(f"label outside the class set: {p if p not in idx else g}")
            counts[idx[g], idx[p]] += 1
        return cls(classes=tuple(classes), counts=counts)


@dataclass
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    classes: tuple[str, ...]
    per_class: dict[str, ClassScores]
    macro_f1: float
    significance: list[dict] = field(default_factory=list)
    robustness_deltas: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def f1(self, cls: str) -> float:
        return self.per_class[cls].f1

    def as_rows(self):
        rows = []
        for cls in self.classes:
            s = self.per_class[cls]
            rows.append(("precision", cls, s.precision))
            rows.append(("recall", cls, s.recall))
            rows.append(("f1", cls, s.f1))
            rows.append(("support", cls, s.support))
        rows.append(("macro_f1", "all", self.macro_f1))
        for cls, delta in self.robustness_deltas.items():
            rows.append(("delta_f1", cls, delta))
        for entry in self.significance:
            rows.append(("p_value", entry["baseline"], entry["p"]))
        return rows


def f1_report(preds, gold, classes) -> EvalReport:
    """Per-class P/R/F1 (0 convention on empty denominators) and macro F1."""
    if len(preds) != len(gold):
        raise ArgdissectError("prediction and gold lists differ in length")
    cm = ConfusionMatrix.from_predictions(preds, gold, classes)
    per_class = {}
    f1s = []
    for i, cls in enumerate(classes):
        tp = cm.counts[i, i]
        pred_total = cm.counts[:, i].sum()
        gold_total = cm.counts[i, :].sum()
        precision = tp / pred_total if pred_total else 0.0
        recall = tp / gold_total if gold_total else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if (precision + recall)
            else 0.0
        )
        per_class[cls] = ClassScores(
            precision=100.0 * precision,
            recall=100.0 * recall,
            f1=100.0 * f1,
            support=int(gold_total),
        )
        f1s.append(100.0 * f1)
    return EvalReport(
        classes=tuple(classes), per_class=per_class, macro_f1=float(np.mean(f1s))
    )


def mfs_baseline(train_labels, classes) -> str:
    """Most frequent training label; ties broken by class order."""
    if not train_labels:
        raise ArgdissectError("empty training label list")
    counts = {c: 0 for c in classes}
    for y in train_labels:
        if y not in counts:
            raise DataError(f"label outside the class set: {y}")
        counts[y] += 1
    return max(classes, key=lambda c: (counts[c], -classes.index(c)))


def _macro_f1_encoded(pred: np.ndarray, gold: np.ndarray, k: int) -> float:
    f1s = np.empty(k)
    for c in range(k):
        tp = np.count_nonzero((pred == c) & (gold == c))
        pp = np.count_nonzero(pred == c)
        gp = np.count_nonzero(gold == c)
        denom = pp + gp
        f1s[c] = 2.0 * tp / denom if denom else 0.0
    return float(f1s.mean())


def significance(
    preds_a, preds_b, gold, classes, n: int = 10000, seed: int = 0
) -> float:
    """Two-sided approximate-randomization test on the macro F1 difference.

    Each permutation swaps the two systems' predictions per instance with
    probability 0.5; p = (#{|Δperm| >= |Δobs|} + 1) / (n + 1).
    """
    if n < 100:
        raise ArgdissectError("n < 100 permutations is unstable; use more")
    if not (len(preds_a) == len(preds_b) == len(gold)):
        raise ArgdissectError("prediction lists are not aligned")
    idx = {c: i for i, c in enumerate(classes)}
    a = np.array([idx[p] for p in preds_a])
    b = np.array([idx[p] for p in preds_b])
    g = np.array([idx[p] for p in gold])
    k = len(classes)

    obs = abs(_macro_f1_encoded(a, g, k) - _macro_f1_encoded(b, g, k))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n):
        mask = rng.random(len(g)) < 0.5
        pa = np.where(mask, b, a)
        pb = np.where(mask, a, b)
        delta = abs(_macro_f1_encoded(pa, g, k) - _macro_f1_encoded(pb, g, k))
        if delta >= obs:
            hits += 1
    return (hits + 1) / (n + 1)


# --------------------------------------------------------------------------
# Robustness transforms over instance views


def _swap_context(view: InstanceView, donor: InstanceView) -> InstanceView:
    source = replace(view.source, context=donor.source.context)
    target = view.target
    if target is not None:
        target = replace(target, context=donor.target.context)
    return replace(view, source=source, target=target)


def randomize_contexts(views: list[InstanceView], seed: int) -> list[InstanceView]:
    """Reassign every instance's context layers from another test instance.

    Draws a uniform permutation of the test set (identity rejected and
    redrawn); EAU content layers stay untouched.
    """
    if len(views) < 2:
        raise ArgdissectError("need at least two instances to randomize contexts")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(views))
    while np.array_equal(perm, np.arange(len(views))):
        perm = rng.permutation(len(views))
    return [_swap_context(view, views[j]) for view, j in zip(views, perm)]


def strip_contexts(views: list[InstanceView]) -> list[InstanceView]:
    """Empty all context layers; idempotent."""
    out = []
    for view in views:
        source = replace(view.source, context=EMPTY_CONTEXT)
        target = view.target
        if target is not None:
            target = replace(target, context=EMPTY_CONTEXT)
        out.append(replace(view, source=source, target=target))
    return out


# --------------------------------------------------------------------------
# ANOVA feature scoring


@dataclass
class AnovaCurve:
    f_scores: np.ndarray  # per feature index
    percentiles: np.ndarray  # the percentile grid, 0..100
    curves: dict[str, np.ndarray]  # type -> F value at each percentile


def anova_f_scores(X: np.ndarray, labels) -> np.ndarray:
    """One-way ANOVA F statistic per column of X.

    F = (SSB / (k-1)) / (SSW / (N-k)).  Features constant within every
    class but varying between classes get the capped-infinity sentinel;
    features constant everywhere get 0.
    """
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise ArgdissectError("ANOVA needs at least two classes")
    n = X.shape[0]
    for c in classes:
        if np.count_nonzero(labels == c) < 2:
            raise ArgdissectError(f"class {c!r} has fewer than two instances")

    grand_mean = X.mean(axis=0)
    ssb = np.zeros(X.shape[1])
    ssw = np.zeros(X.shape[1])
    for c in classes:
        Xc = X[labels == c]
        mc = Xc.mean(axis=0)
        ssb += Xc.shape[0] * (mc - grand_mean) ** 2
        ssw += ((Xc - mc) ** 2).sum(axis=0)
    dfb = len(classes) - 1
    dfw = n - len(classes)
    msb = ssb / dfb
    msw = ssw / dfw
    with np.errstate(divide="ignore", invalid="ignore"):
        f = msb / msw
    f = np.where(msw == 0, np.where(msb > 0, ANOVA_INF_SENTINEL, 0.0), f)
    return np.minimum(f, ANOVA_INF_SENTINEL)


def anova_scores(
    vectors, labels, registry: FeatureRegistry, percentile_step: int = 1
) -> AnovaCurve:
    """F scores over the registry's features plus CB/CI percentile curves."""
    n_features = len(registry)
    X = np.zeros((len(vectors), n_features))
    for row, vec in enumerate(vectors):
        for idx, val in vec.items():
            X[row, idx] = val
    f = anova_f_scores(X, labels)
    percentiles = np.arange(0, 101, percentile_step, dtype=float)
    curves = {}
    for ftype in (CB, CI):
        idxs = registry.indices_of_type(ftype)
        if idxs:
            curves[ftype] = np.percentile(f[idxs], percentiles)
        else:
            curves[ftype] = np.zeros_like(percentiles)
    return AnovaCurve(f_scores=f, percentiles=percentiles, curves=curves)


def format_report(report: EvalReport, title: str = "evaluation") -> str:
    """Human-readable table."""
    lines = [title, "-" * len(title)]
    lines.append(f"{'class':<10}{'P':>8}{'R':>8}{'F1':>8}{'support':>9}")
    for cls in report.classes:
        s = report.per_class[cls]
        lines.append(
            f"{cls:<10}{s.precision:>8.1f}{s.recall:>8.1f}{s.f1:>8.1f}{s.support:>9d}"
        )
    lines.append(f"macro F1: {report.macro_f1:.1f}")
    for entry in report.significance:
        lines.append(
            f"vs {entry['baseline']}: p = {entry['p']:.4g} "
            f"(n={entry['n_permutations']}, seed={entry['seed']})"
        )
    for cls, delta in report.robustness_deltas.items():
        lines.append(f"delta F1 {cls}: {delta:+.1f}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines)
