"""Small input-validation helpers used by the functional core.

The sklearn-facing estimator goes through ``sklearn.utils.validation``;
these helpers keep the core usable without it.
"""

import math

import numpy as np

from .exceptions import InvalidInputError, ParameterError, ShapeError


def as_float_matrix(X, name="X", allow_empty=True):
    """Return ``X`` as a 2-D float64 array, rejecting NaN/inf."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.shape[0] == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or infinite values")
    return arr


def check_n_features(X, n_features, name="X"):
    if X.shape[0] == 0 and X.shape[1] == 0:
        return X.reshape(0, n_features)
    if X.shape[1] != n_features:
        raise ShapeError(
            f"{name} has {X.shape[1]} features, expected {n_features}")
    return X


def check_kt(kT):
    try:
        value = float(kT)
    except (TypeError, ValueError):
        raise ParameterError(f"kT must be a positive real, got {kT!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"kT must be a positive finite real, got {kT!r}")
    return value
