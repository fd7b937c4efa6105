import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basa import ml
from basa.model import TrainedModel

from oracles import gaussian_blobs


def test_standardizer_example():
    s = ml.fit_standardizer([[1.0], [2.0], [3.0]])
    assert s.means[0] == 2.0
    assert s.stdevs[0] == pytest.approx(0.816496580927726, abs=1e-12)
    assert ml.apply_standardizer(s, [[2.0]])[0, 0] == 0.0


def test_standardizer_constant_column():
    s = ml.fit_standardizer([[5.0, 1.0], [5.0, 2.0]])
    assert s.stdevs[0] == 0
    assert np.all(s.transform([[5.0, 0.0], [7.0, 0.0]])[:, 0] == 0)


def test_standardizer_refit_is_identity():
    X = np.random.default_rng(0).normal(3, 7, size=(50, 4))
    Z = ml.fit_standardizer(X).transform(X)
    again = ml.fit_standardizer(Z)
    assert again.means == pytest.approx(0, abs=1e-12)
    assert again.stdevs == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("bad", [[[1.0, 2.0], [3.0]], [], [1.0, 2.0]])
def test_bad_matrices(bad):
    with pytest.raises(ml.ModelError):
        ml.fit_standardizer(bad)


def test_standardizer_round_trip():
    s = ml.fit_standardizer([[1.0, 4.0], [3.0, 4.0]])
    t = ml.Standardizer.from_dict(s.to_dict())
    assert np.array_equal(t.means, s.means) and np.array_equal(t.stdevs, s.stdevs)


def test_gini():
    assert ml.gini([5, 0]) == 0
    assert ml.gini([1, 1]) == 0.5
    assert ml.gini([1, 1, 1]) == pytest.approx(2 / 3)


def test_tree_sign_data():
    X = [[-2.0], [-1.0], [1.0], [2.0]]
    y = [-1, -1, 1, 1]
    tree = ml.train_tree(X, y)
    assert tree.depth == 1
    assert tree.threshold[0] == 0.0
    assert list(tree.predict(X)) == y


def test_tree_pure_data_is_leaf():
    tree = ml.train_tree([[1.0], [2.0], [3.0]], [2, 2, 2])
    assert tree.node_count == 1
    assert tree.predict([[9.0]])[0] == 2


def test_tree_conflicting_duplicates():
    tree = ml.train_tree([[1.0, 1.0]] * 4, [3, 2, 3, 2])
    assert tree.node_count == 1
    assert tree.predict([[1.0, 1.0]])[0] == 2


def test_tree_majority_leaf():
    tree = ml.train_tree([[0.0]] * 3, [1, 2, 2])
    assert tree.predict([[0.0]])[0] == 2


def test_tree_max_depth():
    X, y = gaussian_blobs(1, n_per_class=30, separation=1.0)
    for depth in (0, 1, 2, 3):
        assert ml.train_tree(X, y, max_depth=depth).depth <= depth


def test_tree_tie_prefers_lower_feature():
    # both columns separate the classes equally well
    tree = ml.train_tree([[0.0, 0.0], [1.0, 1.0]], [1, 2])
    assert tree.feature[0] == 0


def test_tree_empty_data():
    with pytest.raises(ml.ModelError):
        ml.train_tree([], [])


def test_unbounded_tree_fits_consistent_data():
    rng = np.random.default_rng(3)
    for _ in range(10):
        X = rng.normal(size=(60, 4))
        y = rng.integers(1, 4, size=60)
        assert np.array_equal(ml.train_tree(X, y).predict(X), y)


def _splits_never_raise_impurity(tree, X, y):
    idx_of = {0: np.arange(len(X))}
    for node in range(tree.node_count):
        if tree.label[node] >= 0:
            continue
        idx = idx_of[node]
        f, thr = tree.feature[node], tree.threshold[node]
        left = idx[X[idx, f] <= thr]
        right = idx[X[idx, f] > thr]
        assert len(left) and len(right)

        def g(ix):
            return ml.gini(np.unique(y[ix], return_counts=True)[1])
        weighted = (len(left) * g(left) + len(right) * g(right)) / len(idx)
        assert weighted <= g(idx) + 1e-12
        idx_of[tree.left[node]] = left
        idx_of[tree.right[node]] = right


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_split_impurity_never_increases(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=(30, 3)).astype(float)
    y = rng.integers(0, 3, size=30)
    _splits_never_raise_impurity(ml.train_tree(X, y), X, y)


def test_forest_of_one_equals_tree():
    rng = np.random.default_rng(11)
    for _ in range(20):
        X = rng.normal(size=(40, 5))
        y = rng.integers(1, 4, size=40)
        probe = rng.normal(size=(100, 5))
        forest = ml.train_forest(X, y, n_estimators=1, max_features="all", bootstrap=False)
        assert np.array_equal(forest.predict(probe), ml.train_tree(X, y).predict(probe))


def test_forest_determinism_and_truncation():
    X, y = gaussian_blobs(2, n_per_class=20, separation=1.5)
    a = ml.train_forest(X, y, n_estimators=12, seed=5)
    b = ml.train_forest(X, y, n_estimators=12, seed=5)
    assert a.to_dict() == b.to_dict()
    small = ml.train_forest(X, y, n_estimators=4, seed=5)
    assert a.truncated(4).to_dict() == small.to_dict()
    assert ml.train_forest(X, y, n_estimators=4, seed=6).to_dict() != small.to_dict()


def test_forest_vote_tie_lowest_label():
    forest = ml.RandomForest(np.array([1, 2]), [], 0)
    forest.trees = [ml.train_tree([[0.0]], [1], classes=[1, 2]),
                    ml.train_tree([[0.0]], [2], classes=[1, 2])]
    assert forest.predict([[0.0]])[0] == 1


@pytest.mark.parametrize("kwargs", [{"n_estimators": 0}, {"max_features": "log2"}])
def test_forest_bad_params(kwargs):
    with pytest.raises(ml.ModelError):
        ml.train_forest([[0.0], [1.0]], [1, 2], **kwargs)


def test_forest_round_trip():
    X, y = gaussian_blobs(4, n_per_class=10)
    f = ml.train_forest(X, y, n_estimators=3)
    g = ml.RandomForest.from_dict(f.to_dict(), f.classes, X.shape[1])
    assert np.array_equal(f.votes(X), g.votes(X))


def test_svm_separable():
    X = [[-1.0, 0.0]] * 20 + [[1.0, 0.0]] * 20
    y = ["A"] * 20 + ["B"] * 20
    model = ml.train_svm(X, y)
    assert list(model.predict(X)) == y


def test_svm_determinism():
    X, y = gaussian_blobs(5, n_per_class=20)
    a = ml.train_svm(X, y, lam=0.1, epochs=5, seed=3)
    b = ml.train_svm(X, y, lam=0.1, epochs=5, seed=3)
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.biases, b.biases)


def test_svm_single_class():
    with pytest.raises(ml.ModelError):
        ml.train_svm([[0.0], [1.0]], [1, 1])


@pytest.mark.parametrize("kwargs", [{"lam": 0}, {"epochs": 0}])
def test_svm_bad_params(kwargs):
    with pytest.raises(ml.ModelError):
        ml.train_svm([[0.0], [1.0]], [1, 2], **kwargs)


@pytest.mark.parametrize("c", [2.0, 3.0, 0.25])
def test_svm_pipeline_scale_invariance(c):
    X, y = gaussian_blobs(6, n_per_class=20, separation=2.0)
    probe = gaussian_blobs(7, n_per_class=20, separation=2.0)[0]
    names = ["TRAD"]  # mask is bookkeeping here
    base = TrainedModel.fit(X[:, :7], y, "svm", names, {"lambda": 0.1, "epochs": 20})
    scaled = TrainedModel.fit(c * X[:, :7], y, "svm", names, {"lambda": 0.1, "epochs": 20})
    assert np.array_equal(base.predict(probe[:, :7]), scaled.predict(c * probe[:, :7]))


def test_svm_tie_lowest_label():
    model = ml.LinearSvm(np.array([1, 2]), np.zeros((2, 1)), np.zeros(2), 0.1, 1, 0)
    assert model.predict([[3.0]])[0] == 1


def test_rng_streams_are_distinct():
    a = ml.rng_stream(42, ml.TREE_STREAM, 0).integers(0, 2**32, 4)
    b = ml.rng_stream(42, ml.TREE_STREAM, 1).integers(0, 2**32, 4)
    c = ml.rng_stream(42, ml.SVM_STREAM, 0).integers(0, 2**32, 4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(ml.ModelError):
        ml.rng_stream(-1, 0)
