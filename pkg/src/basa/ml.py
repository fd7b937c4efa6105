"""From-scratch classifiers: standardizer, CART tree, random forest, linear SVM.

Randomness
----------
Every random draw comes from a PCG64 generator seeded through numpy's
``SeedSequence`` with the entropy ``[seed, domain, index]``. ``domain``
separates components (trees, SVM classes, folds) and ``index`` is the tree
number, class number or class-of-fold number. Each stream is independent of
the order in which the others are consumed, so results do not depend on
scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TREE_STREAM, SVM_STREAM, FOLD_STREAM = 1, 2, 3
_TIE_EPS = 1e-12


class ModelError(ValueError):
    pass


def rng_stream(seed: int, domain: int, index: int = 0) -> np.random.Generator:
    if seed < 0:
        raise ModelError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, domain, index])))


def as_matrix(X) -> np.ndarray:
    try:
        arr = np.asarray(X, dtype=float)
    except ValueError:
        raise ModelError("input rows have different lengths") from None
    if arr.ndim != 2:
        raise ModelError(f"expected a 2-D feature matrix, got {arr.ndim} dimension(s)")
    if arr.shape[0] == 0:
        raise ModelError("empty feature matrix")
    return arr


def _check_xy(X, y):
    X = as_matrix(X)
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != len(X):
        raise ModelError(f"{len(X)} samples but {y.size} labels")
    return X, y


# -- standardizer -----------------------------------------------------------

@dataclass
class Standardizer:
    means: np.ndarray
    stdevs: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = as_matrix(X)
        return cls(X.mean(axis=0), X.std(axis=0))

    def transform(self, X) -> np.ndarray:
        X = as_matrix(X)
        if X.shape[1] != len(self.means):
            raise ModelError(f"expected {len(self.means)} features, got {X.shape[1]}")
        out = np.zeros_like(X)
        ok = self.stdevs > 0
        out[:, ok] = (X[:, ok] - self.means[ok]) / self.stdevs[ok]
        return out

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "stdevs": self.stdevs.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Standardizer":
        return cls(np.asarray(d["means"], dtype=float), np.asarray(d["stdevs"], dtype=float))


def fit_standardizer(X) -> Standardizer:
    return Standardizer.fit(X)


def apply_standardizer(model: Standardizer, X) -> np.ndarray:
    return model.transform(X)


# -- decision tree ----------------------------------------------------------

def gini(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    return 0.0 if n == 0 else 1.0 - float(((counts / n) ** 2).sum())


def _majority(counts: np.ndarray) -> int:
    # argmax returns the first maximum, i.e. the lowest class
    return int(np.argmax(counts))


@dataclass
class DecisionTree:
    """Binary tree in array form; ``label[i] >= 0`` marks a leaf.

    Samples with ``x[feature] <= threshold`` go left. Labels are indices
    into ``classes``.
    """

    classes: np.ndarray
    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    label: list = field(default_factory=list)
    n_features: int = 0

    @property
    def node_count(self) -> int:
        return len(self.label)

    @property
    def depth(self) -> int:
        depths = [0] * self.node_count
        for i in range(self.node_count):
            if self.label[i] < 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return max(depths)

    def _add(self, feature=-1, threshold=0.0, label=-1) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.label.append(label)
        return len(self.label) - 1

    def apply_index(self, X) -> np.ndarray:
        """Class index predicted for each row of *X*."""
        X = as_matrix(X)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold, dtype=float)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        label = np.asarray(self.label)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        active = label[node] < 0
        while active.any():
            r, nd = rows[active], node[active]
            go_left = X[r, feature[nd]] <= threshold[nd]
            node[r] = np.where(go_left, left[nd], right[nd])
            active = label[node] < 0
        return label[node]

    def predict(self, X) -> np.ndarray:
        return self.classes[self.apply_index(X)]

    def to_dict(self) -> dict:
        return {
            "feature": list(map(int, self.feature)),
            "threshold": list(map(float, self.threshold)),
            "left": list(map(int, self.left)),
            "right": list(map(int, self.right)),
            "label": list(map(int, self.label)),
        }

    @classmethod
    def from_dict(cls, d, classes, n_features) -> "DecisionTree":
        return cls(np.asarray(classes), list(d["feature"]), list(d["threshold"]),
                   list(d["left"]), list(d["right"]), list(d["label"]), n_features)


def _best_split(X, yk, n_classes, idx, features):
    """Lowest weighted Gini split over *features* among rows *idx*.

    Returns ``(impurity, feature, threshold)`` or None when no feature has
    two distinct values. Ties go to the lower feature index, then the lower
    threshold.
    """
    n = len(idx)
    sub = X[np.ix_(idx, features)]
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    ys = yk[idx][order]
    onehot = (ys[..., None] == np.arange(n_classes)).astype(float)
    left = np.cumsum(onehot, axis=0)[:-1]
    total = left[-1] + onehot[-1]
    right = total - left
    nl = np.arange(1, n, dtype=float)[:, None]
    nr = n - nl
    weighted = (nl - (left ** 2).sum(-1) / nl + nr - (right ** 2).sum(-1) / nr) / n
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    weighted = np.where(valid, weighted, np.inf).T.ravel()
    best = weighted.min()
    pick = int(np.flatnonzero(weighted <= best + _TIE_EPS)[0])
    f_pos, row = divmod(pick, n - 1)
    lo, hi = xs[row, f_pos], xs[row + 1, f_pos]
    thr = (lo + hi) / 2.0
    if not lo <= thr < hi:
        thr = lo
    return float(weighted[pick]), int(features[f_pos]), float(thr)


def train_tree(X, y, max_depth: int | None = None, min_samples_split: int = 2,
               feature_subset_provider: Callable[[int], Sequence[int]] | None = None,
               classes=None) -> DecisionTree:
    """Greedy CART with Gini impurity.

    *feature_subset_provider*, if given, is called once per split search
    with the number of features and returns the candidate feature indices.
    """
    X, y = _check_xy(X, y)
    classes = np.unique(y) if classes is None else np.asarray(classes)
    yk = np.searchsorted(classes, y)
    if np.any(classes[np.minimum(yk, len(classes) - 1)] != y):
        raise ModelError("labels outside the given class list")
    if max_depth is not None and max_depth < 0:
        raise ModelError("max_depth must be >= 0")
    k = len(classes)
    d = X.shape[1]
    tree = DecisionTree(classes, n_features=d)

    def grow(idx, depth):
        counts = np.bincount(yk[idx], minlength=k)
        pure = np.count_nonzero(counts) == 1
        if (pure or len(idx) < max(min_samples_split, 2)
                or (max_depth is not None and depth >= max_depth)):
            return tree._add(label=_majority(counts))
        feats = range(d) if feature_subset_provider is None else feature_subset_provider(d)
        feats = np.asarray(sorted(set(int(f) for f in feats)), dtype=np.int64)
        found = _best_split(X, yk, k, idx, feats) if len(feats) else None
        if found is None:
            return tree._add(label=_majority(counts))
        _, f, thr = found
        node = tree._add(feature=f, threshold=thr)
        mask = X[idx, f] <= thr
        tree.left[node] = grow(idx[mask], depth + 1)
        tree.right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(len(X)), 0)
    return tree


# -- random forest ----------------------------------------------------------

MAX_FEATURES = ("sqrt", "all")


@dataclass
class RandomForest:
    classes: np.ndarray
    trees: list
    seed: int
    max_features: str = "sqrt"
    max_depth: int | None = None
    min_samples_split: int = 2
    bootstrap: bool = True

    @property
    def n_estimators(self) -> int:
        return len(self.trees)

    def truncated(self, n_estimators: int) -> "RandomForest":
        """The forest that training with fewer estimators would have produced.

        Tree ``t`` depends only on ``(seed, t)``, so the first trees of a
        larger forest are exactly a smaller forest.
        """
        if not 1 <= n_estimators <= len(self.trees):
            raise ModelError(f"cannot truncate {len(self.trees)} trees to {n_estimators}")
        return RandomForest(self.classes, self.trees[:n_estimators], self.seed,
                            self.max_features, self.max_depth, self.min_samples_split,
                            self.bootstrap)

    def votes(self, X) -> np.ndarray:
        X = as_matrix(X)
        out = np.zeros((len(X), len(self.classes)), dtype=np.int64)
        rows = np.arange(len(X))
        for tree in self.trees:
            np.add.at(out, (rows, tree.apply_index(X)), 1)
        return out

    def predict(self, X) -> np.ndarray:
        return self.classes[np.argmax(self.votes(X), axis=1)]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "max_features": self.max_features,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "bootstrap": self.bootstrap,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d, classes, n_features) -> "RandomForest":
        classes = np.asarray(classes)
        trees = [DecisionTree.from_dict(t, classes, n_features) for t in d["trees"]]
        return cls(classes, trees, int(d["seed"]), d["max_features"], d["max_depth"],
                   int(d["min_samples_split"]), bool(d["bootstrap"]))


def _subset_provider(rng: np.random.Generator, size: int):
    def provider(d):
        return rng.choice(d, size=min(size, d), replace=False)
    return provider


def train_forest(X, y, n_estimators: int = 100, max_depth: int | None = None,
                 max_features: str = "sqrt", min_samples_split: int = 2,
                 bootstrap: bool = True, seed: int = 42) -> RandomForest:
    X, y = _check_xy(X, y)
    if n_estimators < 1:
        raise ModelError("n_estimators must be at least 1")
    if max_features not in MAX_FEATURES:
        raise ModelError(f"max_features must be one of {MAX_FEATURES}")
    classes = np.unique(y)
    n, d = X.shape
    n_sub = math.ceil(math.sqrt(d))
    trees = []
    for t in range(n_estimators):
        rng = rng_stream(seed, TREE_STREAM, t)
        sample = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        provider = _subset_provider(rng, n_sub) if max_features == "sqrt" else None
        trees.append(train_tree(X[sample], y[sample], max_depth, min_samples_split,
                                provider, classes=classes))
    return RandomForest(classes, trees, seed, max_features, max_depth,
                        min_samples_split, bootstrap)


def predict_forest(model: RandomForest, X) -> np.ndarray:
    return model.predict(X)


# -- linear SVM -------------------------------------------------------------

@dataclass
class LinearSvm:
    """One-vs-rest linear SVM; ``weights[c]`` and ``biases[c]`` per class."""

    classes: np.ndarray
    weights: np.ndarray
    biases: np.ndarray
    lam: float
    epochs: int
    seed: int

    def decision_function(self, X) -> np.ndarray:
        X = as_matrix(X)
        return X @ self.weights.T + self.biases

    def predict(self, X) -> np.ndarray:
        return self.classes[np.argmax(self.decision_function(X), axis=1)]

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "epochs": self.epochs,
            "seed": self.seed,
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
        }

    @classmethod
    def from_dict(cls, d, classes) -> "LinearSvm":
        return cls(np.asarray(classes), np.asarray(d["weights"], dtype=float),
                   np.asarray(d["biases"], dtype=float), float(d["lambda"]),
                   int(d["epochs"]), int(d["seed"]))


def train_svm(X, y, lam: float = 0.01, epochs: int = 100, seed: int = 42) -> LinearSvm:
    """Pegasos-style sub-gradient descent on the L2-regularized hinge loss.

    One binary problem per class (that class against the rest). The bias
    is learned as the weight of a constant input of 1. Step ``t`` uses the
    learning rate ``1 / (lam * t)``; after each step the weights are
    projected onto the ball of radius ``1 / sqrt(lam)``. Each class visits
    the samples in its own shuffled order every epoch.
    """
    X, y = _check_xy(X, y)
    if not lam > 0:
        raise ModelError("lambda must be positive")
    if epochs < 1:
        raise ModelError("epochs must be at least 1")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ModelError("SVM training needs at least two classes")
    n, d = X.shape
    k = len(classes)
    Xa = np.hstack([X, np.ones((n, 1))])
    signs = np.where(y[:, None] == classes[None, :], 1.0, -1.0)
    W = np.zeros((k, d + 1))
    rngs = [rng_stream(seed, SVM_STREAM, c) for c in range(k)]
    radius = 1.0 / math.sqrt(lam)
    cls_idx = np.arange(k)
    t = 0
    for _ in range(epochs):
        order = np.stack([r.permutation(n) for r in rngs])
        for i in range(n):
            t += 1
            eta = 1.0 / (lam * t)
            picked = order[:, i]
            rows = Xa[picked]
            ys = signs[picked, cls_idx]
            margin = ys * np.einsum("ij,ij->i", W, rows)
            W *= 1.0 - eta * lam
            viol = margin < 1.0
            if viol.any():
                W[viol] += (eta * ys[viol])[:, None] * rows[viol]
            norms = np.sqrt(np.einsum("ij,ij->i", W, W))
            over = norms > radius
            if over.any():
                W[over] *= (radius / norms[over])[:, None]
    return LinearSvm(classes, W[:, :-1].copy(), W[:, -1].copy(), lam, epochs, seed)


def predict_svm(model: LinearSvm, X) -> np.ndarray:
    return model.predict(X)
