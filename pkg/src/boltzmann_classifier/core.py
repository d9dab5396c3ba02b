"""Boltzmann classifier core: MinMax scaling, class centroids, energies and
temperature-scaled class probabilities.

Everything here is a pure function of immutable inputs; a fitted
:class:`BoltzmannModel` can be shared across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from ._validation import as_float_matrix, check_kt, check_n_features
from .exceptions import FitError, InvalidInputError, ShapeError

FORMAT_VERSION = 1


class Metric(str, Enum):
    L1 = "l1"
    L2 = "l2"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, Metric):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInputError(
                f"unknown metric {value!r}; choose one of "
                f"{[m.value for m in cls]}") from None


def _frozen(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix with integer labels indexing ``class_names``."""

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple
    feature_names: tuple

    def __post_init__(self):
        X = as_float_matrix(self.features, "features")
        y = np.asarray(self.labels)
        if y.ndim != 1:
            raise ShapeError("labels must be 1-dimensional")
        if y.size and not np.issubdtype(y.dtype, np.integer):
            raise InvalidInputError("labels must be integer class indices")
        y = y.astype(np.int64)
        class_names = tuple(str(c) for c in self.class_names)
        feature_names = tuple(str(f) for f in self.feature_names)
        if X.shape[0] == 0 and X.shape[1] == 0:
            X = X.reshape(0, len(feature_names))
        if X.shape[0] != y.shape[0]:
            raise ShapeError(
                f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if X.shape[1] != len(feature_names):
            raise ShapeError(
                f"{X.shape[1]} feature columns but {len(feature_names)} names")
        if len(set(class_names)) != len(class_names):
            raise InvalidInputError("class_names must be unique")
        if len(set(feature_names)) != len(feature_names):
            raise InvalidInputError("feature_names must be unique")
        if y.size and (y.min() < 0 or y.max() >= len(class_names)):
            raise InvalidInputError("label index out of range of class_names")
        X = _frozen(X)
        y = y.copy()
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "class_names", class_names)
        object.__setattr__(self, "feature_names", feature_names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[idx], self.labels[idx],
                              self.class_names, self.feature_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass(frozen=True, eq=False)
class ScalerParams:
    """Per-feature training minima and maxima."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64).ravel()
        maxs = np.asarray(self.maxs, dtype=np.float64).ravel()
        if mins.shape != maxs.shape:
            raise ShapeError("mins and maxs must have the same length")
        if not (np.all(np.isfinite(mins)) and np.all(np.isfinite(maxs))):
            raise InvalidInputError("scaler bounds must be finite")
        if np.any(mins > maxs):
            raise InvalidInputError("scaler requires mins <= maxs")
        object.__setattr__(self, "mins", _frozen(mins))
        object.__setattr__(self, "maxs", _frozen(maxs))

    @property
    def n_features(self) -> int:
        return self.mins.shape[0]

    @property
    def constant_features(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.maxs == self.mins))


def fit_scaler(train_features) -> ScalerParams:
    """Column-wise min/max of a non-empty, finite training matrix."""
    X = as_float_matrix(train_features, "train_features", allow_empty=False)
    if X.shape[1] == 0:
        raise InvalidInputError("train_features has no columns")
    return ScalerParams(X.min(axis=0), X.max(axis=0))


def transform(scaler: ScalerParams, features) -> np.ndarray:
    """Map each column to ``(x - min) / (max - min)``.

    Constant training columns map to 0.0. Values outside the training
    range are extrapolated linearly, not clipped.
    """
    X = check_n_features(as_float_matrix(features, "features"),
                         scaler.n_features, "features")
    span = scaler.maxs - scaler.mins
    constant = span == 0.0
    safe_span = np.where(constant, 1.0, span)
    out = (X - scaler.mins) / safe_span
    out[:, constant] = 0.0
    return out


@dataclass(frozen=True, eq=False)
class BoltzmannModel:
    """Fitted classifier: one centroid per class in scaled feature space."""

    centroids: np.ndarray
    class_names: tuple
    kT: float
    metric: Metric
    scaler: ScalerParams
    feature_names: tuple
    constant_features: tuple = field(default=())

    def __post_init__(self):
        centroids = np.asarray(self.centroids, dtype=np.float64)
        if centroids.ndim != 2 or centroids.shape[0] < 1:
            raise ShapeError("centroids must be a non-empty (C, d) matrix")
        if not np.all(np.isfinite(centroids)):
            raise InvalidInputError("centroids must be finite")
        if len(self.class_names) != centroids.shape[0]:
            raise ShapeError("one class name per centroid row required")
        if len(self.feature_names) != centroids.shape[1]:
            raise ShapeError("one feature name per centroid column required")
        if self.scaler.n_features != centroids.shape[1]:
            raise ShapeError("scaler length does not match centroids")
        object.__setattr__(self, "centroids", _frozen(centroids))
        object.__setattr__(self, "kT", check_kt(self.kT))
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        object.__setattr__(self, "class_names",
                           tuple(str(c) for c in self.class_names))
        object.__setattr__(self, "feature_names",
                           tuple(str(f) for f in self.feature_names))
        object.__setattr__(self, "constant_features",
                           tuple(int(i) for i in self.constant_features))

    @property
    def n_classes(self) -> int:
        return self.centroids.shape[0]

    @property
    def n_features(self) -> int:
        return self.centroids.shape[1]

    def with_kt(self, kT) -> "BoltzmannModel":
        """Same centroids and scaler, different temperature."""
        return BoltzmannModel(self.centroids, self.class_names, kT,
                              self.metric, self.scaler, self.feature_names,
                              self.constant_features)


def fit(dataset: LabeledDataset, kT=1.0, metric="l1") -> BoltzmannModel:
    """Fit the scaler on all training rows, then average scaled rows per class.

    Raises
    ------
    FitError
        If a declared class has no training samples.
    ParameterError
        If ``kT`` is not a positive finite number.
    """
    kT = check_kt(kT)
    metric = Metric.parse(metric)
    counts = dataset.class_counts()
    empty = [name for name, n in zip(dataset.class_names, counts) if n == 0]
    if empty:
        raise FitError(f"no training samples for class(es): {', '.join(empty)}")
    scaler = fit_scaler(dataset.features)
    scaled = transform(scaler, dataset.features)
    centroids = np.vstack([scaled[dataset.labels == c].mean(axis=0)
                           for c in range(dataset.n_classes)])
    return BoltzmannModel(centroids, dataset.class_names, kT, metric, scaler,
                          dataset.feature_names, scaler.constant_features)


def _energies(centroids, X, metric):
    diff = X[:, None, :] - centroids[None, :, :]
    if metric is Metric.L1:
        return np.abs(diff).sum(axis=2)
    return np.sqrt(np.square(diff).sum(axis=2))


def energy(model: BoltzmannModel, x) -> np.ndarray:
    """Energy of each class for already-scaled input.

    A 1-D ``x`` gives a length-C vector; a 2-D batch gives ``(n, C)``.
    """
    single = np.ndim(x) == 1
    X = check_n_features(as_float_matrix(x, "x"), model.n_features, "x")
    E = _energies(model.centroids, X, model.metric)
    return E[0] if single else E


def boltzmann_probabilities(energies, kT) -> np.ndarray:
    """Normalized ``exp(-E / kT)`` along the last axis.

    Energies are shifted by their minimum first, which leaves the result
    unchanged and keeps the largest weight at exactly 1.
    """
    kT = check_kt(kT)
    E = np.asarray(energies, dtype=np.float64)
    if E.shape[-1] == 0:
        raise ShapeError("need at least one class energy")
    weights = np.exp(-(E - E.min(axis=-1, keepdims=True)) / kT)
    return weights / weights.sum(axis=-1, keepdims=True)


def predict_proba(model: BoltzmannModel, x) -> np.ndarray:
    """Class probabilities for scaled input, columns ordered as ``class_names``."""
    return boltzmann_probabilities(energy(model, x), model.kT)


def predict(model: BoltzmannModel, x):
    """Index of the most probable class; ties go to the lowest index.

    Computed as the argmin of the energies, which is the argmax of the
    probabilities for every kT but immune to rounding in the exponentials.
    """
    E = energy(model, x)
    return int(np.argmin(E)) if E.ndim == 1 else np.argmin(E, axis=1)


def predict_batch(model: BoltzmannModel, features, apply_scaler=True):
    """Row-wise labels and probability matrix for raw (or scaled) features."""
    X = check_n_features(as_float_matrix(features, "features"),
                         model.n_features, "features")
    if apply_scaler:
        X = transform(model.scaler, X)
    E = _energies(model.centroids, X, model.metric)
    if X.shape[0] == 0:
        return np.empty(0, dtype=np.int64), np.empty((0, model.n_classes))
    return np.argmin(E, axis=1), boltzmann_probabilities(E, model.kT)


# -- persistence ---------------------------------------------------------------

def model_to_dict(model: BoltzmannModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "class_names": list(model.class_names),
        "feature_names": list(model.feature_names),
        "centroids": [[float(v) for v in row] for row in model.centroids],
        "kT": float(model.kT),
        "metric": model.metric.value,
        "scaler": {"mins": [float(v) for v in model.scaler.mins],
                   "maxs": [float(v) for v in model.scaler.maxs]},
        "constant_features": list(model.constant_features),
    }


def model_from_dict(doc: dict) -> BoltzmannModel:
    try:
        version = doc["format_version"]
        if version != FORMAT_VERSION:
            raise InvalidInputError(f"unsupported model format_version {version}")
        scaler = ScalerParams(doc["scaler"]["mins"], doc["scaler"]["maxs"])
        return BoltzmannModel(
            centroids=np.asarray(doc["centroids"], dtype=np.float64),
            class_names=tuple(doc["class_names"]),
            kT=doc["kT"],
            metric=doc["metric"],
            scaler=scaler,
            feature_names=tuple(doc["feature_names"]),
            constant_features=tuple(doc.get("constant_features",
                                            scaler.constant_features)),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed model document: {exc!r}") from None


def dumps_model(model: BoltzmannModel) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(model_to_dict(model), indent=2, allow_nan=False) + "\n"


def loads_model(text: str) -> BoltzmannModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(doc)


def save_model(model: BoltzmannModel, path) -> None:
    from ._io import atomic_write_text
    atomic_write_text(Path(path), dumps_model(model))


def load_model(path) -> BoltzmannModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))


def delta_probability(probabilities) -> np.ndarray:
    """``P(class 0) - P(class 1)`` per row of a two-column probability matrix."""
    P = np.asarray(probabilities, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 2:
        raise ShapeError("delta probability is defined for two classes only")
    return P[:, 0] - P[:, 1]


def validate_centroid_range(model: BoltzmannModel, atol=1e-12) -> bool:
    """True when every centroid entry lies in [0, 1] (up to ``atol``)."""
    C = model.centroids
    return bool(np.all(C >= -atol) and np.all(C <= 1.0 + atol))


def _as_names(values: Sequence) -> tuple:
    return tuple(str(v) for v in values)


def dataset_from_arrays(X, y, feature_names=None) -> LabeledDataset:
    """Build a dataset from raw labels, encoding classes by first appearance."""
    y = list(np.asarray(y).tolist())
    class_names = list(dict.fromkeys(str(v) for v in y))
    index = {name: i for i, name in enumerate(class_names)}
    X = as_float_matrix(X, "X")
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(X.shape[1])]
    return LabeledDataset(X, np.array([index[str(v)] for v in y], dtype=np.int64),
                          _as_names(class_names), _as_names(feature_names))


__all__ = [
    "BoltzmannModel", "LabeledDataset", "Metric", "ScalerParams",
    "boltzmann_probabilities", "dataset_from_arrays", "delta_probability",
    "dumps_model", "energy", "fit", "fit_scaler", "load_model", "loads_model",
    "model_from_dict", "model_to_dict", "predict", "predict_batch",
    "predict_proba", "save_model", "transform", "validate_centroid_range",
]
