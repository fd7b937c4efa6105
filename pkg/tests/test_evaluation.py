import json
import random

import numpy as np
import pytest

from basa import evaluation as ev
from basa.features import FEATURE_SETS, FeatureTable, feature_names

from oracles import brute_metrics, gaussian_blobs


def test_folds_exact_division():
    plan = ev.stratified_folds([1] * 5 + [2] * 5, k=5, seed=42)
    labels = [1] * 5 + [2] * 5
    for fold in plan.folds:
        assert sorted(labels[i] for i in fold) == [1, 2]


def test_folds_too_few_members():
    with pytest.raises(ev.EvaluationError, match="class 2 has 3"):
        ev.stratified_folds([1] * 5 + [2] * 3, k=5)


def test_folds_bad_k():
    with pytest.raises(ev.EvaluationError):
        ev.stratified_folds([1, 2], k=1)


@pytest.mark.parametrize("seed", range(10))
def test_folds_partition_and_balance(seed):
    rng = random.Random(seed)
    labels = [rng.choice([1, 2, 3]) for _ in range(rng.randint(30, 60))]
    k = rng.randint(2, 6)
    if min(labels.count(c) for c in set(labels)) < k:
        return
    plan = ev.stratified_folds(labels, k, seed)
    flat = sorted(i for f in plan.folds for i in f)
    assert flat == list(range(len(labels)))
    for c in set(labels):
        per_fold = [sum(labels[i] == c for i in f) for f in plan.folds]
        assert max(per_fold) - min(per_fold) <= 1
    sizes = [len(f) for f in plan.folds]
    assert max(sizes) - min(sizes) <= 1
    assert plan == ev.stratified_folds(labels, k, seed)


def test_metrics_perfect():
    m, c = ev.compute_metrics([1, 2, 3], [1, 2, 3])
    assert m.summary() == {"accuracy": 1.0, "precision": 1.0, "recall": 1.0, "f1": 1.0}
    assert c.counts == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_metrics_hand_example():
    y_true = ["a"] * 4 + ["b"] * 6
    y_pred = ["a", "a", "a", "b", "a", "a", "b", "b", "b", "b"]
    m, c = ev.compute_metrics(y_true, y_pred)
    assert c.counts == ((3, 1), (2, 4))
    assert m.accuracy == 0.7
    assert m.precision == pytest.approx(0.72, abs=1e-15)
    assert m.recall == 0.7


def test_metrics_unpredicted_class_precision_zero():
    m, _ = ev.compute_metrics([1, 2, 2], [2, 2, 2])
    assert m.per_class_precision[0] == 0.0
    assert m.per_class_f1[0] == 0.0


def test_metrics_errors():
    with pytest.raises(ev.EvaluationError):
        ev.compute_metrics([1, 2], [1])
    with pytest.raises(ev.EvaluationError):
        ev.compute_metrics([], [])


@pytest.mark.parametrize("seed", range(100))
def test_metrics_match_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 40)
    classes = list(range(1, rng.randint(2, 5)))
    y_true = [rng.choice(classes) for _ in range(n)]
    y_pred = [rng.choice(classes) for _ in range(n)]
    m, c = ev.compute_metrics(y_true, y_pred)
    brute = brute_metrics(y_true, y_pred)
    assert m.recall == m.accuracy
    for key in ("accuracy", "precision", "recall", "f1"):
        assert getattr(m, key) == pytest.approx(brute[key], abs=1e-12)
    assert [list(r) for r in c.counts] == brute["matrix"]
    assert c.trace / c.total == m.accuracy
    assert all(0 <= v <= 1 for v in m.summary().values())


def test_confusion_csv():
    _, c = ev.compute_metrics([1, 1, 2], [1, 2, 2])
    assert c.to_csv() == "true\\predicted,1,2\n1,1,1\n2,0,1\n"


def test_expand_grid_order():
    points = ev.expand_grid({"a": [1, 2], "b": ["x", "y"]})
    assert points == [{"a": 1, "b": "x"}, {"a": 1, "b": "y"},
                      {"a": 2, "b": "x"}, {"a": 2, "b": "y"}]
    assert len(ev.expand_grid(ev.DEFAULT_GRIDS["rf"])) == 18
    assert len(ev.expand_grid(ev.DEFAULT_GRIDS["svm"])) == 4


def test_grid_of_one_is_plain_cv():
    X, y = gaussian_blobs(1, n_per_class=15, separation=2.0)
    params = {"lambda": 0.1, "epochs": 10}
    result = ev.grid_search_cv(X, y, "svm", {k: [v] for k, v in params.items()}, 5, 42)
    pooled = np.empty_like(y)
    from basa import ml
    for train, test in ev.stratified_folds(y, 5, 42).splits():
        s = ml.fit_standardizer(X[train])
        model = ml.train_svm(s.transform(X[train]), y[train], 0.1, 10, 42)
        pooled[test] = model.predict(s.transform(X[test]))
    assert result.params == params
    assert result.metrics.accuracy == float(np.mean(pooled == y))


def test_rf_truncation_matches_separate_training():
    X, y = gaussian_blobs(2, n_per_class=10, separation=1.0)
    grid = {"n_estimators": [3, 7], "max_depth": [None], "max_features": ["sqrt"]}
    res = ev.grid_search_cv(X, y, "rf", grid, 5, 42)
    for n, acc in zip([3, 7], res.point_accuracies):
        single = ev.grid_search_cv(X, y, "rf", dict(grid, n_estimators=[n]), 5, 42)
        assert single.metrics.accuracy == acc


def test_ties_pick_first_point():
    X, y = gaussian_blobs(3, n_per_class=10, separation=8.0)
    grid = {"n_estimators": [5], "max_depth": [10, None], "max_features": ["all"]}
    res = ev.grid_search_cv(X, y, "rf", grid, 5, 42)
    assert res.point_accuracies == [1.0, 1.0]
    assert res.params["max_depth"] == 10


@pytest.mark.parametrize("algorithm", ["rf", "svm"])
def test_blobs_default_grid(algorithm):
    X, y = gaussian_blobs(0)
    res = ev.grid_search_cv(X, y, algorithm, None, 5, 42)
    assert res.metrics.accuracy >= 0.95


def test_search_determinism():
    X, y = gaussian_blobs(4, n_per_class=10, separation=1.0)
    grid = {"n_estimators": [5], "max_depth": [None, 2], "max_features": ["sqrt"]}
    a = ev.grid_search_cv(X, y, "rf", grid, 5, 9)
    b = ev.grid_search_cv(X, y, "rf", grid, 5, 9)
    assert a.point_accuracies == b.point_accuracies
    assert a.confusion == b.confusion


@pytest.mark.parametrize("algorithm,grid,classes", [
    ("rf", {"n_estimators": [5], "max_features": ["all"]}, [1, 2, 3]),
    # one linear score per class cannot single out the middle of three
    # values on one axis, so the linear model gets two classes
    ("svm", {"lambda": [0.01], "epochs": [50]}, [1, 2]),
])
def test_label_feature_gives_perfect_accuracy(algorithm, grid, classes):
    rng = np.random.default_rng(0)
    y = np.repeat(classes, 10)
    X = np.column_stack([rng.normal(size=len(y)), y.astype(float)])
    assert ev.grid_search_cv(X, y, algorithm, grid).metrics.accuracy == 1.0


@pytest.mark.parametrize("algorithm,params", [
    ("rf", {"n_estimators": 5, "max_features": "all"}),
    ("svm", {"lambda": 0.1, "epochs": 10}),
])
def test_column_constant_in_training_cannot_leak(algorithm, params):
    X, y = gaussian_blobs(5, n_per_class=10, d=3, separation=1.0)
    plan = ev.stratified_folds(y, 5, 42)
    for train, test in plan.splits():
        leak = np.zeros(len(y))
        leak[test] = y[test] * 100.0  # label only visible in held-out rows
        plain = ev._fold_predictions(algorithm, X, y, train, test, [params], 42)[0]
        leaky = ev._fold_predictions(algorithm, np.column_stack([X, leak]), y, train, test,
                                     [params], 42)[0]
        assert np.array_equal(plain, leaky)


def test_unknown_algorithm():
    with pytest.raises(ev.EvaluationError):
        ev.grid_search_cv([[0.0]] * 10, [1, 2] * 5, "knn")


def small_table(seed=0, per_class=6):
    rng = np.random.default_rng(seed)
    names = feature_names(FEATURE_SETS)
    labels = [1] * per_class + [2] * per_class + [3] * per_class
    rows = [list(rng.normal(size=len(names)) + lab) for lab in labels]
    return FeatureTable([f"d{i:02d}" for i in range(len(labels))], labels, list(names), rows)


TINY_GRIDS = {"rf": {"n_estimators": [3], "max_depth": [None], "max_features": ["sqrt"]},
              "svm": {"lambda": [0.1], "epochs": [5]}}


@pytest.mark.parametrize("algorithm", ["rf", "svm"])
def test_ablation_shape(algorithm):
    report = ev.run_ablation(small_table(), algorithm, seed=42, k=3, grids=TINY_GRIDS)
    d = report.to_dict()
    assert [r["feature_set"] for r in d["rows"]] == [ev.ablation_label(m)
                                                     for m in ev.ABLATION_MASKS]
    assert len(d["rows"]) == 15
    assert d["rows"][0]["feature_set"] == "TRAD"
    assert d["rows"][-1]["feature_set"] == "ALL"
    assert sum(r["best"] for r in d["rows"]) == 1
    best = d["rows"][d["best_row"]]
    assert best["accuracy"] == max(r["accuracy"] for r in d["rows"])
    counts = d["confusion_matrix"]["counts"]
    trace = sum(counts[i][i] for i in range(len(counts)))
    assert trace / sum(map(sum, counts)) == pytest.approx(best["accuracy"], rel=1e-9)
    table = report.table().splitlines()
    assert len(table) == 16
    assert table[1 + d["best_row"]].startswith("*")


def test_ablation_determinism():
    a = ev.run_ablation(small_table(), "rf", seed=42, k=3, grids=TINY_GRIDS)
    b = ev.run_ablation(small_table(), "rf", seed=42, k=3, grids=TINY_GRIDS)
    assert ev.dumps_report(a.to_dict()) == ev.dumps_report(b.to_dict())
    json.loads(ev.dumps_report(a.to_dict()))


def test_ablation_missing_columns():
    t = small_table()
    keep = [i for i, n in enumerate(t.names) if not n.startswith("lm_")]
    t = FeatureTable(t.doc_ids, t.labels, [t.names[i] for i in keep],
                     [[r[i] for i in keep] for r in t.rows])
    with pytest.raises(ValueError, match="lm_l1_n1"):
        ev.run_ablation(t, "rf", k=3, grids=TINY_GRIDS)


def test_evaluate_table_report():
    report = ev.evaluate_table(small_table(), "svm", ["TRAD", "SYLL"], k=3,
                               grid=TINY_GRIDS["svm"])
    assert report["mask"] == ["TRAD", "SYLL"]
    assert report["metrics"]["recall"] == report["metrics"]["accuracy"]
    assert report["n_samples"] == 18
