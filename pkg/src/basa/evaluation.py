"""Stratified cross-validation, grid search, metrics and the ablation protocol."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import ml
from .features import FEATURE_SETS, FeatureTable, mask_label, parse_mask

REPORT_SCHEMA = "basa.report/1"

# row order of the published ablation tables
ABLATION_MASKS = (
    ("TRAD",),
    ("LEX",),
    ("SYLL",),
    ("LM",),
    ("MORPH",),
    ("TRAD", "LEX"),
    ("TRAD", "LM"),
    ("TRAD", "SYLL"),
    ("TRAD", "MORPH"),
    ("TRAD", "LEX", "SYLL"),
    ("TRAD", "LEX", "LM"),
    ("TRAD", "LEX", "MORPH"),
    ("TRAD", "LEX", "SYLL", "LM"),
    ("TRAD", "LEX", "SYLL", "MORPH"),
    FEATURE_SETS,
)

DEFAULT_GRIDS = {
    "rf": {
        "n_estimators": [50, 100, 200],
        "max_depth": [None, 5, 10],
        "max_features": ["sqrt", "all"],
    },
    "svm": {
        "lambda": [1e-3, 1e-2, 1e-1, 1.0],
        "epochs": [100],
    },
}
ALGORITHMS = tuple(DEFAULT_GRIDS)
MODEL_PARAMS = {
    "rf": ("n_estimators", "max_depth", "max_features", "min_samples_split", "bootstrap"),
    "svm": ("lambda", "epochs"),
}


class EvaluationError(ValueError):
    pass


def ablation_label(mask) -> str:
    """Row label as printed in the ablation tables (``TRAD + LEX + SYLL + LM``)."""
    mask = tuple(mask)
    if set(mask) == set(FEATURE_SETS):
        return "ALL"
    return " + ".join(mask)


# -- folds ------------------------------------------------------------------

@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def splits(self):
        """Yield ``(train_indices, test_indices)`` per fold."""
        n = sum(len(f) for f in self.folds)
        for fold in self.folds:
            test = np.asarray(fold, dtype=np.int64)
            mask = np.ones(n, dtype=bool)
            mask[test] = False
            yield np.flatnonzero(mask), test


def stratified_folds(labels: Sequence, k: int = 5, seed: int = 42) -> FoldPlan:
    """Shuffle each class with its own seeded stream and deal it round-robin.

    The dealing position carries over from one class to the next so that
    fold sizes stay within one of each other as well.
    """
    if k < 2:
        raise EvaluationError("k must be at least 2")
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    small = [(c, n) for c, n in zip(classes.tolist(), counts.tolist()) if n < k]
    if small:
        desc = ", ".join(f"class {c} has {n}" for c, n in small)
        raise EvaluationError(f"stratified {k}-fold split impossible: {desc}")
    folds: list[list[int]] = [[] for _ in range(k)]
    slot = 0
    for ci, c in enumerate(classes):
        members = np.flatnonzero(labels == c)
        members = members[ml.rng_stream(seed, ml.FOLD_STREAM, ci).permutation(len(members))]
        for idx in members:
            folds[slot].append(int(idx))
            slot = (slot + 1) % k
    return FoldPlan(k, tuple(tuple(sorted(f)) for f in folds), seed)


# -- metrics ----------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple
    counts: tuple[tuple[int, ...], ...]  # [true][predicted]

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    @property
    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.labels)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["true\\predicted", *self.labels])
        for lab, row in zip(self.labels, self.counts):
            writer.writerow([lab, *row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": [list(r) for r in self.counts]}


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    labels: tuple
    per_class_precision: tuple
    per_class_recall: tuple
    per_class_f1: tuple
    support: tuple

    def summary(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


def _py(v):
    return v.item() if isinstance(v, np.generic) else v


def compute_metrics(y_true, y_pred) -> tuple[MetricsReport, ConfusionMatrix]:
    """Support-weighted precision, recall and F1 plus the confusion matrix.

    Weighted recall equals accuracy by construction; it is computed as
    ``trace / total`` so the identity holds exactly.
    """
    y_true = [_py(v) for v in y_true]
    y_pred = [_py(v) for v in y_pred]
    if len(y_true) != len(y_pred):
        raise EvaluationError(f"{len(y_true)} true labels but {len(y_pred)} predictions")
    if not y_true:
        raise EvaluationError("cannot score an empty prediction set")
    labels = tuple(sorted(set(y_true) | set(y_pred)))
    pos = {lab: i for i, lab in enumerate(labels)}
    m = [[0] * len(labels) for _ in labels]
    for t, p in zip(y_true, y_pred):
        m[pos[t]][pos[p]] += 1
    total = len(y_true)
    support = [sum(row) for row in m]
    predicted = [sum(m[r][c] for r in range(len(labels))) for c in range(len(labels))]
    prec, rec, f1 = [], [], []
    for i in range(len(labels)):
        tp = m[i][i]
        p = tp / predicted[i] if predicted[i] else 0.0
        r = tp / support[i] if support[i] else 0.0
        prec.append(p)
        rec.append(r)
        f1.append(2 * p * r / (p + r) if p + r else 0.0)
    trace = sum(m[i][i] for i in range(len(labels)))
    accuracy = trace / total
    report = MetricsReport(
        accuracy=accuracy,
        precision=sum(s * p for s, p in zip(support, prec)) / total,
        recall=accuracy,
        f1=sum(s * f for s, f in zip(support, f1)) / total,
        labels=labels,
        per_class_precision=tuple(prec),
        per_class_recall=tuple(rec),
        per_class_f1=tuple(f1),
        support=tuple(support),
    )
    return report, ConfusionMatrix(labels, tuple(tuple(r) for r in m))


# -- grid search ------------------------------------------------------------

def expand_grid(grid: Mapping[str, Sequence]) -> list[dict]:
    """Grid points in enumeration order: the last key varies fastest."""
    keys = list(grid)
    for key in keys:
        if not len(grid[key]):
            raise EvaluationError(f"empty grid axis {key!r}")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def fit_model(algorithm: str, X, y, params: Mapping, seed: int):
    unknown = sorted(set(params) - set(MODEL_PARAMS.get(algorithm, params)))
    if unknown:
        raise EvaluationError(f"unknown {algorithm} parameter(s): {', '.join(unknown)}")
    if algorithm == "rf":
        return ml.train_forest(X, y, n_estimators=int(params.get("n_estimators", 100)),
                               max_depth=params.get("max_depth"),
                               max_features=params.get("max_features", "sqrt"),
                               min_samples_split=int(params.get("min_samples_split", 2)),
                               bootstrap=bool(params.get("bootstrap", True)), seed=seed)
    if algorithm == "svm":
        return ml.train_svm(X, y, lam=float(params.get("lambda", 0.01)),
                            epochs=int(params.get("epochs", 100)), seed=seed)
    raise EvaluationError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def _fold_predictions(algorithm, X, y, train, test, points, seed):
    """Held-out predictions of every grid point for one fold."""
    scaler = ml.Standardizer.fit(X[train])
    Xtr, Xte = scaler.transform(X[train]), scaler.transform(X[test])
    preds: list = [None] * len(points)
    if algorithm == "rf":
        # the first t trees of a forest are the t-tree forest, so only the
        # largest forest per remaining parameter combination is trained
        groups: dict = {}
        for i, p in enumerate(points):
            rest = tuple(sorted((k, repr(v)) for k, v in p.items() if k != "n_estimators"))
            groups.setdefault(rest, []).append(i)
        for members in groups.values():
            largest = max(int(points[i].get("n_estimators", 100)) for i in members)
            params = dict(points[members[0]], n_estimators=largest)
            forest = fit_model("rf", Xtr, y[train], params, seed)
            for i in members:
                sub = forest.truncated(int(points[i].get("n_estimators", 100)))
                preds[i] = sub.predict(Xte)
    else:
        for i, p in enumerate(points):
            preds[i] = fit_model(algorithm, Xtr, y[train], p, seed).predict(Xte)
    return preds


@dataclass
class SearchResult:
    params: dict
    metrics: MetricsReport
    confusion: ConfusionMatrix
    point_accuracies: list = field(default_factory=list)


def grid_search_cv(X, y, algorithm: str, grid: Mapping | None = None,
                   folds: FoldPlan | int = 5, seed: int = 42) -> SearchResult:
    """Exhaustive grid search scored on pooled held-out predictions.

    For each grid point every fold trains a fresh standardizer and model on
    its training part and predicts its held-out part; the held-out
    predictions of all folds are pooled and scored once. The point with the
    highest pooled accuracy wins, earlier points winning ties.
    """
    if algorithm not in ALGORITHMS:
        raise EvaluationError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    X = ml.as_matrix(X)
    y = np.asarray(y)
    if len(y) != len(X):
        raise EvaluationError(f"{len(X)} samples but {len(y)} labels")
    grid = DEFAULT_GRIDS[algorithm] if grid is None else grid
    points = expand_grid(grid)
    plan = folds if isinstance(folds, FoldPlan) else stratified_folds(y, folds, seed)
    pooled = [np.empty(len(y), dtype=y.dtype) for _ in points]
    seen = np.zeros(len(y), dtype=np.int64)
    for train, test in plan.splits():
        seen[test] += 1
        for i, pred in enumerate(_fold_predictions(algorithm, X, y, train, test, points, seed)):
            pooled[i][test] = pred
    if not np.all(seen == 1):
        raise EvaluationError("fold plan does not cover every sample exactly once")
    best, best_acc, accs = 0, -1.0, []
    for i, pred in enumerate(pooled):
        acc = float(np.mean(pred == y))
        accs.append(acc)
        if acc > best_acc:
            best, best_acc = i, acc
    metrics, confusion = compute_metrics(y, pooled[best])
    return SearchResult(points[best], metrics, confusion, accs)


# -- reports ----------------------------------------------------------------

def _round(v: float) -> float:
    return float(f"{v:.9g}")


def _params_json(params: Mapping) -> dict:
    return {k: (_py(v)) for k, v in params.items()}


def labels_of(table: FeatureTable) -> np.ndarray:
    if any(lab is None for lab in table.labels):
        raise EvaluationError("every row of the feature file needs a grade label")
    return np.asarray(table.labels)


def evaluate_table(table: FeatureTable, algorithm: str, mask=None, k: int = 5,
                   seed: int = 42, grid=None) -> dict:
    mask = table.sets_present() if mask is None else parse_mask(mask)
    if not mask:
        raise EvaluationError("feature file holds no complete feature set")
    X = table.matrix(mask)
    y = labels_of(table)
    result = grid_search_cv(X, y, algorithm, grid, stratified_folds(y, k, seed), seed)
    return {
        "schema": REPORT_SCHEMA,
        "kind": "evaluation",
        "algorithm": algorithm,
        "seed": seed,
        "folds": k,
        "mask": list(mask),
        "mask_label": mask_label(mask),
        "n_samples": int(len(y)),
        "best_params": _params_json(result.params),
        "metrics": {k_: _round(v) for k_, v in result.metrics.summary().items()},
        "per_class": {
            str(lab): {"precision": _round(p), "recall": _round(r), "f1": _round(f),
                       "support": s}
            for lab, p, r, f, s in zip(result.metrics.labels, result.metrics.per_class_precision,
                                       result.metrics.per_class_recall,
                                       result.metrics.per_class_f1, result.metrics.support)
        },
        "confusion_matrix": result.confusion.to_dict(),
    }


@dataclass
class AblationRow:
    mask: tuple
    result: SearchResult

    @property
    def label(self) -> str:
        return ablation_label(self.mask)


@dataclass
class AblationReport:
    algorithm: str
    seed: int
    k: int
    rows: list

    @property
    def best_index(self) -> int:
        best, acc = 0, -1.0
        for i, row in enumerate(self.rows):
            if row.result.metrics.accuracy > acc:
                best, acc = i, row.result.metrics.accuracy
        return best

    def to_dict(self) -> dict:
        best = self.best_index
        rows = []
        for i, row in enumerate(self.rows):
            m = row.result.metrics
            rows.append({
                "feature_set": row.label,
                "mask": list(row.mask),
                "accuracy": _round(m.accuracy),
                "precision": _round(m.precision),
                "recall": _round(m.recall),
                "f1": _round(m.f1),
                "best_params": _params_json(row.result.params),
                "confusion_matrix": row.result.confusion.to_dict(),
                "best": i == best,
            })
        return {
            "schema": REPORT_SCHEMA,
            "kind": "ablation",
            "algorithm": self.algorithm,
            "seed": self.seed,
            "folds": self.k,
            "rows": rows,
            "best_row": best,
            "best_feature_set": self.rows[best].label,
            "confusion_matrix": self.rows[best].result.confusion.to_dict(),
        }

    def table(self) -> str:
        """Plain-text table; the best row is marked with ``*``."""
        lines = [f"{'Feature Set':<28} {'Accuracy':>8} {'Precision':>9} {'Recall':>7} {'F1 Score':>8}"]
        best = self.best_index
        for i, row in enumerate(self.rows):
            m = row.result.metrics
            mark = "*" if i == best else " "
            lines.append(f"{mark}{row.label:<27} {m.accuracy:8.3f} {m.precision:9.3f} "
                         f"{m.recall:7.3f} {m.f1:8.3f}")
        return "\n".join(lines)


def run_ablation(table: FeatureTable, algorithm: str, seed: int = 42, k: int = 5,
                 grids: Mapping | None = None) -> AblationReport:
    """Grid-searched cross-validation for each of the 15 feature-set combinations."""
    missing = [s for s in FEATURE_SETS if s not in table.sets_present()]
    if missing:
        # reports the first absent columns
        table.columns_for(missing)
    y = labels_of(table)
    plan = stratified_folds(y, k, seed)
    grid = None if grids is None else grids.get(algorithm)
    rows = []
    for mask in ABLATION_MASKS:
        X = table.matrix(mask)
        rows.append(AblationRow(mask, grid_search_cv(X, y, algorithm, grid, plan, seed)))
    return AblationReport(algorithm, seed, k, rows)


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
