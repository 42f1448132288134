import numpy as np
import pytest

from eyefresh.classify import (
    ExtraTreesClassifier,
    KNNClassifier,
    LogisticRegression,
    MLPClassifier,
    RandomForestClassifier,
    default_hyperparameters,
    evaluate,
    kfold_indices,
    load_model,
    majority_vote,
    mlp_loss_and_grad,
    predict,
    predict_proba,
    report_from_confusion,
    save_model,
    softmax_loss_and_grad,
    standardize,
    train,
)
from eyefresh.classify.base import one_hot
from eyefresh.classify.forest import build_tree
from eyefresh.classify.mlp import init_params, layer_shapes
from eyefresh.errors import ConfigError, TrainingError

import oracles


def blobs(rng, n_per=30, d=5, sep=4.0):
    centers = rng.normal(0, sep, (3, d))
    X = np.concatenate([rng.normal(c, 1.0, (n_per, d)) for c in centers])
    y = np.repeat([0, 1, 2], n_per)
    return X, y


# ------------------------------------------------------------ standardize

def test_standardize_definition():
    train_X = np.array([[8.0, 5.0], [12.0, 5.0]])
    out, scaler = standardize(train_X, np.array([[12.0, 5.0]]))
    assert out.tolist() == [[1.0, 5.0]]
    assert scaler.transform(train_X)[:, 1].tolist() == [5.0, 5.0]


def test_standardize_uses_train_statistics_only(rng):
    tr = rng.normal(0, 1, (50, 3))
    te = rng.normal(5, 3, (50, 3))
    out, _ = standardize(tr, te)
    assert not np.allclose(out.mean(axis=0), 0, atol=0.5)


# ------------------------------------------------------------ KNN

def test_knn_nearest_neighbour():
    knn = KNNClassifier(n_neighbors=1).fit(np.array([[0.0], [10.0]]), np.array([0, 1]))
    assert knn.predict(np.array([[1.0]])).tolist() == [0]


def test_knn_k1_recovers_training_labels(rng):
    X, y = blobs(rng)
    assert np.array_equal(KNNClassifier(n_neighbors=1).fit(X, y).predict(X), y)


def test_knn_distance_weights_and_exact_match():
    X = np.array([[0.0], [1.0], [3.0]])
    knn = KNNClassifier(n_neighbors=3).fit(X, np.array([0, 1, 1]))
    # weights 1/0.5 for class 0 and 1/0.5 + 1/2.5 for class 1
    assert knn.predict_proba(np.array([[0.5]]))[0] == pytest.approx([2 / 4.4, 2.4 / 4.4])
    assert knn.predict_proba(np.array([[3.0]]))[0].tolist() == [0.0, 1.0]


def test_knn_vote_tie_goes_to_lowest_class():
    knn = KNNClassifier(n_neighbors=2, weights="uniform").fit(np.array([[-1.0], [1.0]]), np.array([2, 0]))
    assert knn.predict(np.array([[0.0]])).tolist() == [0]


def test_knn_manhattan():
    knn = KNNClassifier(n_neighbors=1, p=1).fit(np.array([[0.0, 0.0], [3.0, 0.1]]), np.array([0, 1]))
    assert knn._distances(np.array([[1.0, 1.0]])).tolist() == [[2.0, pytest.approx(2.9)]]


# ------------------------------------------------------------ logistic regression

def _gd_oracle(x, y, steps=200000, lr=0.5, tol=1e-8):
    """Plain gradient descent on unregularized 1-D binary logistic loss."""
    w = b = 0.0
    for _ in range(steps):
        p = 1 / (1 + np.exp(-(w * x + b)))
        gw, gb = np.mean((p - y) * x), np.mean(p - y)
        w, b = w - lr * gw, b - lr * gb
        if max(abs(gw), abs(gb)) < tol:
            break
    return (w * x + b > 0).astype(int)


def test_lr_separates_separable_data():
    x = np.array([-3.0, -2.0, -1.5, -1.0, 1.0, 1.5, 2.0, 3.0])
    y = (x > 0).astype(int)
    assert np.array_equal(_gd_oracle(x, y), y)
    model = train("LR", {}, x[:, None], y)
    assert np.array_equal(predict(model, x[:, None]), y)


def test_lr_gradient_matches_finite_differences(rng):
    X = rng.normal(size=(7, 4))
    Y = one_hot(rng.integers(0, 3, 7), 3)
    w = rng.normal(size=4 * 3 + 3)
    _, g = softmax_loss_and_grad(w, X, Y, 0.7)
    num = oracles.central_difference(lambda p: softmax_loss_and_grad(p, X, Y, 0.7)[0], w)
    assert oracles.relative_error(g, num) < 1e-5


def test_lr_probabilities(rng):
    X, y = blobs(rng)
    m = LogisticRegression().fit(X, y)
    p = m.predict_proba(X)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)
    assert (m.predict(X) == y).mean() > 0.9


# ------------------------------------------------------------ MLP

def test_mlp_gradient_matches_finite_differences(rng):
    X = rng.normal(size=(4, 3))
    Y = one_hot(np.array([0, 1, 2, 1]), 3)
    shapes = layer_shapes(3, (6,), 3)
    params = init_params(shapes, rng)
    _, g = mlp_loss_and_grad(params, X, Y, shapes, 1e-3)
    num = oracles.central_difference(lambda p: mlp_loss_and_grad(p, X, Y, shapes, 1e-3)[0], params)
    assert oracles.relative_error(g, num) < 1e-4


def test_mlp_softmax_rows_sum_to_one(rng):
    X, y = blobs(rng)
    m = MLPClassifier(max_iter=30).fit(X, y, seed=1)
    assert np.allclose(m.predict_proba(X).sum(axis=1), 1.0, atol=1e-9)


def test_mlp_learns_blobs_and_is_deterministic(rng):
    X, y = blobs(rng)
    a = MLPClassifier(max_iter=100).fit(X, y, seed=5)
    b = MLPClassifier(max_iter=100).fit(X, y, seed=5)
    assert np.array_equal(a.params_, b.params_)
    assert (a.predict(X) == y).mean() > 0.95


def test_mlp_rejects_unsupported_settings():
    with pytest.raises(ConfigError):
        MLPClassifier(solver="sgd")
    with pytest.raises(ConfigError):
        MLPClassifier(early_stopping=True)


# ------------------------------------------------------------ trees

def test_tree_fits_training_data(rng):
    X, y = blobs(rng, d=3)
    tree = build_tree(X, y, 3, rng)
    assert np.array_equal(tree.predict_class(X), y)


def test_tree_depth_one_stump():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    tree = build_tree(X, np.array([0, 0, 1, 1]), 2, np.random.default_rng(0), max_depth=1)
    assert tree.feature.tolist() == [0, -1, -1]
    assert tree.threshold[0] == 1.5


def test_majority_vote_tie_goes_to_lowest_class():
    votes = np.array([[0] * 150 + [2] * 150])
    assert majority_vote(votes, 3).tolist() == [0]


@pytest.mark.parametrize("cls", [RandomForestClassifier, ExtraTreesClassifier])
def test_forest_determinism(rng, cls):
    X, y = blobs(rng)
    probe = rng.normal(0, 4, (20, 5))
    a = cls(n_estimators=15).fit(X, y, seed=11).predict(probe)
    b = cls(n_estimators=15).fit(X, y, seed=11).predict(probe)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("cls", [RandomForestClassifier, ExtraTreesClassifier])
def test_forest_accuracy(rng, cls):
    X, y = blobs(rng)
    Xt, yt = X + rng.normal(0, 0.3, X.shape), y
    assert (cls(n_estimators=25).fit(X, y, seed=0).predict(Xt) == yt).mean() > 0.9


def test_forest_beats_chance_by_wide_margin(rng):
    from eyefresh import fusion, synthetic
    from eyefresh.dataset import FreshnessLabel

    imgs, y = [], []
    for label in FreshnessLabel:
        g = np.random.default_rng([9, int(label)])
        for _ in range(30):
            imgs.append(synthetic.eye_image(label, g, 48))
            y.append(int(label))
    X = np.stack([fusion.extract(im, "FS5").values for im in imgs])
    y = np.array(y)
    order = rng.permutation(y.size)
    X, y = X[order], y[order]
    rf = train("RF", {"n_estimators": 50}, X[:60], y[:60], seed=0)
    rf_acc = (predict(rf, X[60:]) == y[60:]).mean()
    noise = rng.normal(size=X.shape)
    knn = train("KNN", {"n_neighbors": 1}, noise[:60], y[:60])
    noise_acc = (predict(knn, noise[60:]) == y[60:]).mean()
    assert rf_acc >= noise_acc + 0.3


# ------------------------------------------------------------ artifacts

@pytest.mark.parametrize("kind", ["KNN", "LR", "MLP", "RF", "ET"])
def test_artifact_roundtrip(tmp_path, rng, kind):
    X, y = blobs(rng, n_per=10)
    params = {"max_iter": 20} if kind == "MLP" else {"n_estimators": 5} if kind in ("RF", "ET") else {}
    model = train(kind, params, X, y, seed=3, feature_set_id="FS1")
    save_model(model, tmp_path / "m.json")
    loaded = load_model(tmp_path / "m.json")
    probe = rng.normal(0, 4, (15, 5))
    assert np.array_equal(predict(loaded, probe), predict(model, probe))
    assert np.array_equal(predict_proba(loaded, probe), predict_proba(model, probe))
    assert loaded.feature_set_id == "FS1" and loaded.kind == kind


def test_predict_rejects_wrong_width(rng):
    X, y = blobs(rng, n_per=5)
    model = train("KNN", {}, X, y)
    with pytest.raises(ConfigError):
        predict(model, X[:, :4])


def test_train_errors(rng):
    X, y = blobs(rng, n_per=5)
    with pytest.raises(ConfigError, match="n_trees"):
        train("RF", {"n_trees": 5}, X, y)
    with pytest.raises(TrainingError):
        train("LR", {}, X, np.zeros(len(y), dtype=int))
    for kind in ("SVM", "LGBM", "CatBoost", "CB"):
        with pytest.raises(ConfigError, match="unsupported"):
            train(kind, {}, X, y)


def test_table_defaults():
    assert default_hyperparameters("KNN")["n_neighbors"] == 17
    assert default_hyperparameters("KNN")["weights"] == "distance"
    mlp = default_hyperparameters("ANN")
    assert mlp["hidden_layer_sizes"] == (128,) and mlp["activation"] == "tanh" and mlp["alpha"] == 0.001
    assert mlp["max_iter"] == 500
    lr = default_hyperparameters("LR")
    assert (lr["C"], lr["max_iter"], lr["penalty"]) == (1.0, 300, "l2")
    rf = default_hyperparameters("RF")
    assert (rf["criterion"], rf["max_depth"], rf["n_estimators"]) == ("gini", 15, 300)
    et = default_hyperparameters("ET")
    assert (et["criterion"], et["n_estimators"], et["max_depth"], et["bootstrap"], et["min_samples_split"]) == (
        "entropy", 180, 35, True, 3)


def test_permuting_test_rows_permutes_predictions(rng):
    X, y = blobs(rng)
    Xt = rng.normal(0, 4, (25, 5))
    perm = rng.permutation(25)
    for kind, params in [("KNN", {}), ("LR", {}), ("RF", {"n_estimators": 10})]:
        model = train(kind, params, X, y, seed=2)
        assert np.array_equal(predict(model, Xt)[perm], predict(model, Xt[perm]))


# ------------------------------------------------------------ metrics

def test_metrics_hand_computed_fixture():
    r = report_from_confusion([[5, 0, 0], [0, 0, 5], [0, 0, 5]])
    assert r.accuracy == pytest.approx(10 / 15)
    assert r.macro_precision == pytest.approx(0.5)
    assert r.macro_recall == pytest.approx(2 / 3)
    assert r.macro_f1 == pytest.approx((1 + 0 + 2 / 3) / 3)
    assert r.per_class["1"]["recall"] == 0.0


def test_metrics_perfect_and_constant():
    y = [0, 1, 2] * 4
    r = evaluate(y, y)
    assert (r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1) == (1.0, 1.0, 1.0, 1.0)
    r = evaluate(y, [1] * 12)
    assert r.accuracy == pytest.approx(1 / 3)
    assert r.accuracy == pytest.approx(r.macro_recall)


def test_metrics_absent_class_contributes_zero():
    r = evaluate([0, 0, 1], [0, 0, 1])
    assert r.macro_precision == pytest.approx(2 / 3)


def test_metrics_errors():
    with pytest.raises(ConfigError):
        evaluate([0, 1], [0])
    with pytest.raises(ConfigError):
        evaluate([], [])


def test_confusion_text():
    text = report_from_confusion([[1, 2, 0], [0, 3, 0], [0, 0, 4]]).confusion_text()
    assert text.splitlines()[1].split() == ["HighlyFresh", "1", "2", "0"]


# ------------------------------------------------------------ k-fold

def test_kfold_balanced_two_class():
    labels = np.array([0, 1] * 5)
    folds = kfold_indices(10, 5, labels, seed=1)
    for _, test in folds:
        assert sorted(labels[test].tolist()) == [0, 1]


def test_kfold_partition_and_determinism(rng):
    labels = rng.integers(0, 3, 97)
    folds = kfold_indices(97, 10, labels, seed=4)
    tests = np.concatenate([t for _, t in folds])
    assert sorted(tests.tolist()) == list(range(97))
    for tr, te in folds:
        assert not set(tr) & set(te) and len(tr) + len(te) == 97
        for c in range(3):
            expected = (labels == c).sum() / 10
            assert abs((labels[te] == c).sum() - expected) <= 1
    again = kfold_indices(97, 10, labels, seed=4)
    assert all(np.array_equal(a[1], b[1]) for a, b in zip(folds, again))


def test_kfold_errors():
    with pytest.raises(ConfigError):
        kfold_indices(6, 1, [0, 1] * 3)
    with pytest.raises(ConfigError):
        kfold_indices(6, 4, [0, 1] * 3)
