import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boltzmann_classifier import baselines, core, data, evaluation
from boltzmann_classifier.core import LabeledDataset
from boltzmann_classifier.exceptions import (ParameterError, ShapeError,
                                             UnsupportedError)
from boltzmann_classifier.metrics import ConfusionMatrix, DeltaProbStats

from conftest import toy_dataset


def blobs(seed, n=40, d=3, sep=6.0, n_classes=2):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_classes, d)) * sep
    y = np.arange(n) % n_classes
    X = centers[y] + rng.normal(scale=0.3, size=(n, d))
    return LabeledDataset(X, y, tuple(f"k{i}" for i in range(n_classes)),
                          tuple(f"f{j}" for j in range(d)))


def test_confusion_matrix_basics():
    cm = ConfusionMatrix.from_predictions([0, 1, 1, 0], [0, 1, 0, 0], ("a", "b"))
    assert cm.counts.tolist() == [[2, 0], [1, 1]]
    assert cm.total == 4 and cm.accuracy == 0.75
    assert "a" in cm.to_text()


def test_perfect_predictions_diagonal():
    ds = toy_dataset()
    report = evaluation.evaluate(core.fit(ds), ds)
    assert report.accuracy == 1.0
    assert report.confusion.counts.tolist() == [[2, 0], [0, 2]]


def test_delta_stats():
    P = np.array([[0.9, 0.1], [0.4, 0.6], [0.55, 0.45]])
    stats = DeltaProbStats.from_probabilities(P, [0, 1, 1], [0, 1, 0])
    np.testing.assert_allclose(stats.deltas, [0.8, -0.2, 0.1])
    assert stats.mean_abs_correct == pytest.approx(0.5)
    assert stats.mean_abs_misclassified == pytest.approx(0.1)
    assert stats.hist_correct.sum() + stats.hist_misclassified.sum() == 3
    assert len(stats.bin_edges) == 21


def test_evaluate_schema_mismatch_and_relabel():
    ds = toy_dataset()
    model = core.fit(ds)
    other = LabeledDataset(ds.features, ds.labels, ds.class_names, ("p", "q"))
    with pytest.raises(ShapeError):
        evaluation.evaluate(model, other)
    swapped = LabeledDataset(ds.features, 1 - ds.labels, ("b", "a"), ds.feature_names)
    assert evaluation.evaluate(model, swapped).accuracy == 1.0
    alien = LabeledDataset(ds.features, ds.labels, ("a", "zzz"), ds.feature_names)
    with pytest.raises(ShapeError):
        evaluation.evaluate(model, alien)


def test_evaluate_delta_matches_tanh(bcw_split):
    train, test = bcw_split
    model = core.fit(train, kT=0.7)
    report = evaluation.evaluate(model, test)
    E = core.energy(model, core.transform(model.scaler, test.features))
    np.testing.assert_allclose(report.delta.deltas,
                               np.tanh((E[:, 1] - E[:, 0]) / (2 * 0.7)), atol=1e-10)
    assert np.all(np.abs(report.delta.deltas) <= 1)


def test_cross_validate_separated_duplicates():
    X = np.repeat([[0.0, 0.0], [5.0, 5.0]], 10, axis=0)
    y = np.repeat([0, 1], 10)
    ds = LabeledDataset(X, y, ("lo", "hi"), ("u", "v"))
    result = evaluation.cross_validate(ds, data.stratified_folds(y, 5, 1))
    assert result.accuracies == [1.0] * 5
    assert result.std_accuracy == 0.0


def test_cross_validate_deterministic(bcw):
    plan = data.stratified_folds(bcw.labels, 5, 42)
    a = evaluation.cross_validate(bcw, plan)
    b = evaluation.cross_validate(bcw, data.stratified_folds(bcw.labels, 5, 42))
    assert a.to_dict() == b.to_dict()
    assert all(abs(acc - 0.95) < 0.07 for acc in a.accuracies)


def test_cross_validate_plan_size_checked():
    with pytest.raises(ShapeError):
        evaluation.cross_validate(toy_dataset(), data.stratified_folds([0, 1] * 5, 2, 0))


def _non_tied(E, tol=1e-9):
    s = np.sort(E, axis=1)
    return (s[:, 1] - s[:, 0]) > tol


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cv_at_tiny_kt_matches_nearest_centroid(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(60, 4))
    y = rng.integers(0, 2, 60)
    y[:10] = 0
    y[10:20] = 1
    ds = LabeledDataset(X, y, ("a", "b"), tuple("wxyz"))
    plan = data.stratified_folds(y, 5, seed)
    cv = evaluation.cross_validate(ds, plan, kT=1e-6)
    for report, (tr, te) in zip(cv.folds, plan.folds()):
        train, test = ds.subset(tr), ds.subset(te)
        model = core.fit(train)
        E = core.energy(model, core.transform(model.scaler, test.features))
        Xtr, Xte = baselines._minmax(train.features, test.features)
        oracle = baselines.nearest_centroid_predict(train, Xte, train_scaled=Xtr)
        mask = _non_tied(E)
        np.testing.assert_array_equal(report.predictions[mask], oracle[mask])
        np.testing.assert_array_equal(np.argmax(report.probabilities, 1)[mask], oracle[mask])


# -- kT sweep ------------------------------------------------------------------

def test_kt_sweep_bcw(bcw_split):
    train, test = bcw_split
    result = evaluation.kt_sweep(train, test, [0.1, 1.0, 10.0])
    assert np.all(np.diff(result.mean_abs_delta_correct) < 0)
    assert len(set(result.accuracy.tolist())) == 1
    assert result.to_csv().splitlines()[0] == "kT,mean_abs_delta_correct,accuracy"


def test_kt_sweep_single_sample_tanh():
    train = LabeledDataset([[0.0, 0.0], [1.0, 1.0]], [0, 1], ("a", "b"), ("u", "v"))
    test = LabeledDataset([[0.2, 0.1]], [0], ("a", "b"), ("u", "v"))
    grid = [0.05, 0.5, 2.0]
    result = evaluation.kt_sweep(train, test, grid)
    # energies: E_a = 0.3, E_b = 1.7 -> |dp| = tanh(1.4 / 2kT)
    np.testing.assert_allclose(result.mean_abs_delta_correct,
                               np.tanh(1.4 / (2 * np.array(grid))), atol=1e-10)


def test_kt_sweep_errors():
    ds = blobs(0, n_classes=3)
    with pytest.raises(UnsupportedError):
        evaluation.kt_sweep(ds, ds, [1.0])
    with pytest.raises(ParameterError):
        evaluation.kt_sweep(toy_dataset(), toy_dataset(), [1.0, 0.5])
    with pytest.raises(ParameterError):
        evaluation.kt_sweep(toy_dataset(), toy_dataset(), [0.0, 1.0])


def test_default_grid():
    g = np.array(evaluation.DEFAULT_KT_GRID)
    assert len(g) == 10 and g[0] == pytest.approx(0.05) and g[-1] == pytest.approx(5.0)
    np.testing.assert_allclose(np.diff(np.log(g)), np.log(100) / 9)


# -- baselines -----------------------------------------------------------------

def test_nearest_centroid_baseline():
    ds = toy_dataset()
    model = core.fit(ds)
    # centroids mapped back to raw units are classified as their own class
    raw = model.centroids * (model.scaler.maxs - model.scaler.mins) + model.scaler.mins
    test = LabeledDataset(raw, [0, 1], ds.class_names, ds.feature_names)
    assert baselines.baseline_nearest_centroid(ds, test).accuracy == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_nearest_centroid_blobs(seed):
    train, test = data.split_train_test(blobs(seed, n=80), 0.25, seed)
    assert baselines.baseline_nearest_centroid(train, test).accuracy == 1.0


def test_knn_rules():
    ds = toy_dataset()
    assert baselines.baseline_knn(ds, ds, k=1).accuracy == 1.0
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    train = LabeledDataset(X, [1, 0, 1, 0], ("a", "b"), ("u",))
    test = LabeledDataset([[0.1], [2.9]], [0, 0], ("a", "b"), ("u",))
    # majority of the three nearest
    assert baselines.baseline_knn(train, test, k=3).predictions.tolist() == [1, 0]
    full = LabeledDataset(np.arange(6.0)[:, None], [0, 1] * 3, ("a", "b"), ("u",))
    with pytest.raises(ParameterError):
        baselines.baseline_knn(full, full, k=7)
    with pytest.raises(ParameterError):
        baselines.baseline_knn(full, full, k=2)
    # k == n_train on an even balanced set is a pure vote tie -> class 0
    train4 = LabeledDataset(np.arange(4.0)[:, None], [1, 0, 1, 0], ("a", "b"), ("u",))
    assert np.all(baselines.knn_predict(train4.features, train4.labels,
                                        np.array([[9.0], [-3.0]]), 4, 2) == 0)


def test_knn_distance_tie_lower_index():
    Xtr = np.array([[1.0], [-1.0]])
    assert baselines.knn_predict(Xtr, np.array([1, 0]), np.array([[0.0]]), 1, 2)[0] == 1


def test_knn_bcw(bcw_split):
    train, test = bcw_split
    # regression value frozen from one run: 0.9646
    assert baselines.baseline_knn(train, test, k=5).accuracy >= 0.93


def test_logreg_separable_1d():
    X = np.array([[-2.0], [-1.0], [-0.5], [0.5], [1.0], [2.0]])
    ds = LabeledDataset(X, [0, 0, 0, 1, 1, 1], ("neg", "pos"), ("x",))
    report = baselines.baseline_logreg(ds, ds, l2=1e-3)
    assert report.accuracy == 1.0


def test_logreg_gradient_at_zero_is_mean_discrepancy():
    rng = np.random.default_rng(2)
    X = rng.random((10, 3))
    t = np.array([0.0, 1.0] * 5)
    _, g = baselines.logistic_loss_grad(np.zeros(4), X, t)
    np.testing.assert_allclose(g[:-1], X.T @ (0.5 - t) / 10, atol=1e-15)
    assert g[-1] == pytest.approx(0.0, abs=1e-15)


def _central_diff(f, w, h=1e-5):
    g = np.zeros_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = h
        g[i] = (f(w + e) - f(w - e)) / (2 * h)
    return g


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_logreg_gradient_finite_differences(seed, l2):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(12, 4))
    t = rng.integers(0, 2, 12).astype(float)
    w = rng.normal(size=5)
    _, g = baselines.logistic_loss_grad(w, X, t, l2)
    fd = _central_diff(lambda p: baselines.logistic_loss_grad(p, X, t, l2)[0], w)
    assert np.max(np.abs(g - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))


def test_logreg_binary_only():
    ds = blobs(1, n_classes=3)
    with pytest.raises(UnsupportedError):
        baselines.baseline_logreg(ds, ds)


def test_logreg_converges_on_easy_problem():
    ds = blobs(4, n=30, d=2, sep=0.5)
    params, n_iter = baselines.fit_logreg(ds.features, ds.labels.astype(float),
                                          l2=1.0, epochs=100000)
    _, g = baselines.logistic_loss_grad(params, ds.features, ds.labels.astype(float), 1.0)
    assert n_iter < 100000 and np.max(np.abs(g)) < 1e-6


def test_compare_methods_text(bcw_split):
    reports = evaluation.compare_methods(*bcw_split)
    assert set(reports) == {"boltzmann", "nearest_centroid", "knn", "logistic_regression"}
    assert reports["boltzmann"].accuracy == reports["nearest_centroid"].accuracy
    text = evaluation.comparison_text(reports)
    assert "svm" in text and "not recomputed" in text


def test_bcw_confidence_gap_over_many_splits(bcw):
    # split-averaged view of the hold-out confidence gap; single splits
    # scatter widely because only ~5-10 samples are misclassified
    wrong, right = [], []
    for seed in range(200):
        train, test = data.split_train_test(bcw, 0.2, seed)
        delta = evaluation.evaluate(core.fit(train), test).delta
        right.append(delta.mean_abs_correct)
        if delta.mean_abs_misclassified is not None:
            wrong.append(delta.mean_abs_misclassified)
    assert np.mean(wrong) < 0.45
    assert np.mean(right) > 0.70
    assert np.mean(wrong) < np.mean(right)
