"""Linear SVM training by dual coordinate descent over sparse vectors.

One binary machine for 2-class tasks, one-vs-rest for 3-class.  The solver
is the standard dual coordinate descent for L2-regularized hinge /
squared-hinge loss; the bias is learned through an augmented constant
feature.  Training order is driven solely by the seed, so retraining is
bit-identical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse as sp

from .errors import ArgdissectError, ModelFormatError
from .features import FeatureRegistry, SparseVector

FORMAT_VERSION = 1

LOSSES = ("hinge", "squared_hinge")
WEIGHTINGS = ("none", "inverse_frequency")


@dataclass(frozen=True)
class TrainConfig:
    c: float = 1.0
    loss: str = "squared_hinge"
    max_epochs: int = 1000
    tolerance: float = 1e-4
    class_weighting: str = "inverse_frequency"
    seed: int = 0

    def __post_init__(self):
        if self.c <= 0 or self.tolerance <= 0 or self.max_epochs <= 0:
            raise ValueError("c, tolerance and max_epochs must be positive")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss: {self.loss}")
        if self.class_weighting not in WEIGHTINGS:
            raise ValueError(f"unknown class weighting: {self.class_weighting}")


@dataclass
class LinearModel:
    classes: tuple[str, ...]
    weights: dict[str, np.ndarray]  # class -> dense weight vector over the registry
    biases: dict[str, float]
    registry_id: str
    model_type: str
    task: str
    config: TrainConfig
    n_features: int
    format_version: int = FORMAT_VERSION
    dual_objectives: dict[str, list[float]] = field(default_factory=dict)


def class_weights(labels: list[str], classes, weighting: str) -> dict[str, float]:
    """Per-class C multipliers; ``inverse_frequency`` follows n/(k*n_c)."""
    if weighting == "none":
        return {c: 1.0 for c in classes}
    counts = {c: 0 for c in classes}
    for y in labels:
        counts[y] += 1
    n, k = len(labels), len(classes)
    return {c: n / (k * counts[c]) if counts[c] else 1.0 for c in classes}


def _to_csr(vectors: list[SparseVector], n_features: int) -> sp.csr_matrix:
    """Sparse matrix with an appended constant column for the bias."""
    data, indices, indptr = [], [], [0]
    for vec in vectors:
        for idx in sorted(vec):
            indices.append(idx)
            data.append(vec[idx])
        indices.append(n_features)  # bias column
        data.append(1.0)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data), np.array(indices), np.array(indptr)),
        shape=(len(vectors), n_features + 1),
    )


def _dcd_binary(X: sp.csr_matrix, y: np.ndarray, C_i: np.ndarray, loss: str,
                tol: float, max_epochs: int, rng: np.random.Generator):
    """Dual coordinate descent for min 0.5||w||^2 + sum_i C_i * loss_i.

    Returns (w, dual objective per epoch).  y in {-1, +1}.
    """
    n, d = X.shape
    data, indices, indptr = X.data, X.indices, X.indptr
    if loss == "hinge":
        D = np.zeros(n)
        U = C_i.astype(float)
    else:  # squared hinge
        D = 1.0 / (2.0 * C_i)
        U = np.full(n, np.inf)
    row_sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    Qbar = row_sq + D

    alpha = np.zeros(n)
    w = np.zeros(d)
    duals = []
    for _ in range(max_epochs):
        order = rng.permutation(n)
        max_pg = 0.0
        for i in order:
            lo, hi = indptr[i], indptr[i + 1]
            cols = indices[lo:hi]
            vals = data[lo:hi]
            G = y[i] * float(w[cols] @ vals) - 1.0 + D[i] * alpha[i]
            if alpha[i] == 0.0:
                PG = min(G, 0.0)
            elif alpha[i] == U[i]:
                PG = max(G, 0.0)
            else:
                PG = G
            if abs(PG) > max_pg:
                max_pg = abs(PG)
            if PG != 0.0:
                a_new = min(max(alpha[i] - G / Qbar[i], 0.0), U[i])
                delta = a_new - alpha[i]
                if delta != 0.0:
                    w[cols] += delta * y[i] * vals
                    alpha[i] = a_new
        dual = float(alpha.sum() - 0.5 * (w @ w) - 0.5 * float((D * alpha * alpha).sum()))
        duals.append(dual)
        if max_pg < tol:
            break
    return w, duals


def train(
    vectors: list[SparseVector],
    labels: list[str],
    config: TrainConfig,
    registry: FeatureRegistry,
    classes: tuple[str, ...],
    model_type: str = "FA",
    task: str = "f",
) -> LinearModel:
    """Train a linear model over the frozen registry's feature space."""
    if not vectors:
        raise ArgdissectError("empty training set")
    present = set(labels)
    if len(present) < 2:
        raise ArgdissectError("training set contains a single class")
    unknown = present - set(classes)
    if unknown:
        raise ArgdissectError(f"labels outside the class set: {sorted(unknown)}")

    n_features = len(registry)
    X = _to_csr(vectors, n_features)
    cw = class_weights(labels, classes, config.class_weighting)
    y_arr = np.array(labels)

    weights: dict[str, np.ndarray] = {}
    biases: dict[str, float] = {}
    duals: dict[str, list[float]] = {}

    # Single binary machine for 2-class problems; one-vs-rest otherwise.
    machines = [classes[0]] if len(classes) == 2 else list(classes)
    for cls in machines:
        y = np.where(y_arr == cls, 1.0, -1.0)
        C_i = np.array([config.c * cw[lab] for lab in labels])
        rng = np.random.default_rng(config.seed)
        w_aug, dual_hist = _dcd_binary(
            X, y, C_i, config.loss, config.tolerance, config.max_epochs, rng
        )
        weights[cls] = w_aug[:n_features].copy()
        biases[cls] = float(w_aug[n_features])
        duals[cls] = dual_hist
    if len(classes) == 2:
        weights[classes[1]] = -weights[classes[0]]
        biases[classes[1]] = -biases[classes[0]]
        duals[classes[1]] = []

    return LinearModel(
        classes=tuple(classes),
        weights=weights,
        biases=biases,
        registry_id=registry.registry_id,
        model_type=model_type,
        task=task,
        config=config,
        n_features=n_features,
        dual_objectives=duals,
    )


def decision_scores(model: LinearModel, vector: SparseVector) -> dict[str, float]:
    scores = {}
    for cls in model.classes:
        w = model.weights[cls]
        s = model.biases[cls]
        for idx, val in vector.items():
            if idx >= model.n_features:
                raise ArgdissectError(
                    f"feature index {idx} outside the model's registry"
                )
            s += w[idx] * val
        scores[cls] = s
    return scores


def predict(model: LinearModel, vector: SparseVector) -> tuple[str, dict[str, float]]:
    """Argmax of the per-class decision values; ties go to the earlier class."""
    scores = decision_scores(model, vector)
    best = max(model.classes, key=lambda c: (scores[c], -model.classes.index(c)))
    return best, scores


def predict_all(model: LinearModel, vectors: list[SparseVector]) -> list[str]:
    return [predict(model, v)[0] for v in vectors]


# --------------------------------------------------------------------------
# Serialization: versioned, checksummed text format.


def _model_body(model: LinearModel) -> str:
    lines = []
    cfg = model.config
    lines.append(f"task={model.task}")
    lines.append(f"model_type={model.model_type}")
    lines.append("classes=" + ",".join(model.classes))
    lines.append(f"registry_id={model.registry_id}")
    lines.append(f"n_features={model.n_features}")
    lines.append(
        "config="
        f"c:{cfg.c!r},loss:{cfg.loss},max_epochs:{cfg.max_epochs},"
        f"tolerance:{cfg.tolerance!r},class_weighting:{cfg.class_weighting},"
        f"seed:{cfg.seed}"
    )
    for cls in model.classes:
        w = model.weights[cls]
        for idx in np.nonzero(w)[0]:
            lines.append(f"{cls}\t{idx}\t{float(w[idx]).hex()}")
        lines.append(f"{cls}\tbias\t{model.biases[cls].hex()}")
    return "\n".join(lines) + "\n"


def save_model(model: LinearModel, path) -> None:
    body = _model_body(model)
    checksum = hashlib.sha256(body.encode("utf-8")).hexdigest()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"argdissect-model v{model.format_version}\n")
        fh.write(f"checksum={checksum}\n")
        fh.write(body)


def load_model(path) -> LinearModel:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        checksum_line = fh.readline().rstrip("\n")
        body = fh.read()
    if not header.startswith("argdissect-model v"):
        raise ModelFormatError("not a model file")
    version = header.removeprefix("argdissect-model v")
    if version != str(FORMAT_VERSION):
        raise ModelFormatError(f"unsupported model format version {version}")
    if not checksum_line.startswith("checksum="):
        raise ModelFormatError("missing checksum line")
    expected = checksum_line.removeprefix("checksum=")
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if actual != expected:
        raise ModelFormatError("checksum mismatch: file is corrupt or truncated")

    meta: dict[str, str] = {}
    triplets: list[tuple[str, str, str]] = []
    for line in body.split("\n"):
        if not line:
            continue
        if "\t" in line:
            cls, key, value = line.split("\t")
            triplets.append((cls, key, value))
        else:
            k, v = line.split("=", 1)
            meta[k] = v

    classes = tuple(meta["classes"].split(","))
    n_features = int(meta["n_features"])
    cfg_parts = dict(p.split(":", 1) for p in meta["config"].split(","))
    config = TrainConfig(
        c=float(cfg_parts["c"]),
        loss=cfg_parts["loss"],
        max_epochs=int(cfg_parts["max_epochs"]),
        tolerance=float(cfg_parts["tolerance"]),
        class_weighting=cfg_parts["class_weighting"],
        seed=int(cfg_parts["seed"]),
    )
    weights = {cls: np.zeros(n_features) for cls in classes}
    biases = {cls: 0.0 for cls in classes}
    for cls, key, value in triplets:
        if key == "bias":
            biases[cls] = float.fromhex(value)
        else:
            weights[cls][int(key)] = float.fromhex(value)
    return LinearModel(
        classes=classes,
        weights=weights,
        biases=biases,
        registry_id=meta["registry_id"],
        model_type=meta["model_type"],
        task=meta["task"],
        config=config,
        n_features=n_features,
    )
