"""Reference classifiers evaluated on the same MinMax-scaled features.

The nearest-centroid baseline is written independently of
:mod:`boltzmann_classifier.core` so it can serve as the zero-temperature
oracle for the Boltzmann probabilities.
"""

from __future__ import annotations

import numpy as np

from .core import LabeledDataset
from .exceptions import ParameterError, UnsupportedError
from .metrics import EvalReport


def _minmax(train_X, test_X):
    lo = train_X.min(axis=0)
    span = train_X.max(axis=0) - lo
    span[span == 0] = np.inf  # constant columns collapse to 0
    return (train_X - lo) / span, (test_X - lo) / span


def nearest_centroid_predict(train: LabeledDataset, X_test_scaled,
                             train_scaled=None):
    """Index of the L1-nearest class mean for each test row (ties: lowest index)."""
    Xtr = train_scaled if train_scaled is not None else train.features
    preds = np.empty(len(X_test_scaled), dtype=np.int64)
    centroids = []
    for c in range(train.n_classes):
        rows = Xtr[train.labels == c]
        centroids.append(rows.sum(axis=0) / len(rows))
    for i, x in enumerate(X_test_scaled):
        best, best_d = 0, np.inf
        for c, mu in enumerate(centroids):
            d = float(np.sum(np.abs(x - mu)))
            if d < best_d:
                best, best_d = c, d
        preds[i] = best
    return preds


def baseline_nearest_centroid(train: LabeledDataset, test: LabeledDataset) -> EvalReport:
    Xtr, Xte = _minmax(train.features, test.features)
    preds = nearest_centroid_predict(train, Xte, train_scaled=Xtr)
    return EvalReport.build("nearest_centroid", test.labels, preds,
                            train.class_names)


def knn_predict(X_train, y_train, X_test, k, n_classes):
    """Majority vote over the ``k`` L2-nearest training rows.

    Distance ties go to the lower training index, vote ties to the lower
    class index.
    """
    d2 = (np.square(X_test).sum(1)[:, None] + np.square(X_train).sum(1)[None, :]
          - 2.0 * X_test @ X_train.T)
    np.maximum(d2, 0.0, out=d2)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    preds = np.empty(X_test.shape[0], dtype=np.int64)
    for i, neighbours in enumerate(order):
        votes = np.bincount(y_train[neighbours], minlength=n_classes)
        preds[i] = int(np.argmax(votes))
    return preds


def baseline_knn(train: LabeledDataset, test: LabeledDataset, k=5) -> EvalReport:
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise ParameterError(f"k must be an odd positive integer, got {k!r}")
    if k > train.n_samples:
        raise ParameterError(f"k={k} exceeds the {train.n_samples} training samples")
    Xtr, Xte = _minmax(train.features, test.features)
    preds = knn_predict(Xtr, train.labels, Xte, int(k), train.n_classes)
    return EvalReport.build("knn", test.labels, preds, train.class_names,
                            params={"k": int(k)})


# -- logistic regression ---------------------------------------------------------

def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_grad(params, X, t, l2=0.0):
    """Mean negative log-likelihood plus ``l2/2 * ||w||^2`` and its gradient.

    ``params`` is ``[w_1..w_d, bias]``; the bias is not penalized.
    ``t`` holds 0/1 targets.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    # log(1 + e^z) - t z, evaluated stably
    loss = np.mean(np.logaddexp(0.0, z) - t * z) + 0.5 * l2 * float(w @ w)
    r = (_sigmoid(z) - t) / X.shape[0]
    grad = np.empty_like(params)
    grad[:-1] = X.T @ r + l2 * w
    grad[-1] = r.sum()
    return loss, grad


def fit_logreg(X, t, l2=1e-4, epochs=20000, step=None, tol=1e-6):
    """Full-batch gradient descent from zero weights.

    Stops when the gradient max-norm drops below ``tol`` or after
    ``epochs`` updates. With ``step=None`` the step is 1/L for the
    smoothness bound L = ||[X, 1]||_2^2 / (4 n) + l2.
    """
    if l2 < 0:
        raise ParameterError("l2 must be non-negative")
    Xb = np.hstack([X, np.ones((X.shape[0], 1))])
    if step is None:
        lipschitz = np.linalg.norm(Xb, 2) ** 2 / (4.0 * X.shape[0]) + l2
        step = 1.0 / lipschitz
    params = np.zeros(X.shape[1] + 1)
    n_iter = 0
    for n_iter in range(1, int(epochs) + 1):
        _, grad = logistic_loss_grad(params, X, t, l2)
        if np.max(np.abs(grad)) < tol:
            break
        params -= step * grad
    return params, n_iter


def baseline_logreg(train: LabeledDataset, test: LabeledDataset, l2=1e-4,
                    epochs=20000, step=None) -> EvalReport:
    """Binary logistic regression; models P(class 1 | x)."""
    if train.n_classes != 2:
        raise UnsupportedError("logistic-regression baseline is binary only")
    Xtr, Xte = _minmax(train.features, test.features)
    t = (train.labels == 1).astype(np.float64)
    params, n_iter = fit_logreg(Xtr, t, l2=l2, epochs=epochs, step=step)
    p1 = _sigmoid(Xte @ params[:-1] + params[-1])
    probs = np.column_stack([1.0 - p1, p1])
    preds = (p1 > 0.5).astype(np.int64)
    return EvalReport.build("logistic_regression", test.labels, preds,
                            train.class_names, probabilities=probs,
                            params={"l2": l2, "epochs_run": n_iter})
