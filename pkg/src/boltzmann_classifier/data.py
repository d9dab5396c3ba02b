"""CSV ingestion, the UCI Breast Cancer Wisconsin adapter, and stratified
splitting utilities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .core import LabeledDataset
from .exceptions import DataError, InvalidInputError, ParameterError

ColumnRef = Union[str, int]

_WDBC_MEASURES = ("radius", "texture", "perimeter", "area", "smoothness",
                  "compactness", "concavity", "concave_points", "symmetry",
                  "fractal_dimension")
WDBC_FEATURE_NAMES = tuple(f"{m}_{stat}" for stat in ("mean", "se", "worst")
                           for m in _WDBC_MEASURES)


@dataclass(frozen=True)
class DatasetSpec:
    """Where a dataset lives and how its columns are laid out.

    Column references are header names, or 0-based integer positions
    (required when ``has_header`` is False).
    """

    path: Path
    label_column: ColumnRef
    ignored_columns: tuple = ()
    delimiter: str = ","
    has_header: bool = True
    feature_names: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "path", Path(self.path))
        object.__setattr__(self, "ignored_columns", tuple(self.ignored_columns))
        if self.label_column in self.ignored_columns:
            raise InvalidInputError("label column cannot also be ignored")


def wdbc_spec(path) -> DatasetSpec:
    """Spec for the UCI ``wdbc.data`` layout: id, diagnosis, 30 reals, no header."""
    return DatasetSpec(path, label_column=1, ignored_columns=(0,),
                       has_header=False, feature_names=WDBC_FEATURE_NAMES)


def _resolve(ref: ColumnRef, header: Sequence[str] | None, n_cols: int) -> int:
    if isinstance(ref, int) or (header is None and str(ref).isdigit()):
        idx = int(ref)
        if not 0 <= idx < n_cols:
            raise DataError(f"column index {idx} out of range (0..{n_cols - 1})")
        return idx
    if header is None:
        raise DataError(f"column {ref!r} given by name but file has no header")
    try:
        return list(header).index(ref)
    except ValueError:
        raise DataError(f"column {ref!r} not found in header") from None


def _finite_or_none(cell):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_csv(spec: DatasetSpec) -> LabeledDataset:
    """Read a delimited text file into a :class:`LabeledDataset`.

    Labels are encoded in order of first appearance. Every feature cell
    must parse as a finite real; blanks and NaN are rejected with their
    row/column position (rows are 1-based file lines).
    """
    try:
        with open(spec.path, newline="", encoding="utf-8") as fh:
            rows = [(i + 1, row) for i, row in
                    enumerate(csv.reader(fh, delimiter=spec.delimiter)) if row]
    except OSError as exc:
        raise DataError(f"cannot read {spec.path}: {exc}") from None
    except csv.Error as exc:
        raise DataError(f"{spec.path}: malformed CSV: {exc}") from None

    header = None
    if spec.has_header:
        if not rows:
            raise DataError(f"{spec.path}: empty file, header expected")
        header = [h.strip() for h in rows[0][1]]
        rows = rows[1:]
    n_cols = len(header) if header is not None else (len(rows[0][1]) if rows else 0)
    if n_cols == 0:
        raise DataError(f"{spec.path}: no columns")

    label_idx = _resolve(spec.label_column, header, n_cols)
    ignored = {_resolve(c, header, n_cols) for c in spec.ignored_columns}
    feat_idx = [j for j in range(n_cols) if j != label_idx and j not in ignored]
    if spec.feature_names:
        if len(spec.feature_names) != len(feat_idx):
            raise DataError(f"{len(spec.feature_names)} feature names given for "
                            f"{len(feat_idx)} feature columns")
        feature_names = tuple(spec.feature_names)
    elif header is not None:
        feature_names = tuple(header[j] for j in feat_idx)
    else:
        feature_names = tuple(f"f{j}" for j in feat_idx)

    def col_name(j):
        return header[j] if header is not None else str(j)

    X = np.empty((len(rows), len(feat_idx)), dtype=np.float64)
    raw_labels = []
    for r, (line_no, row) in enumerate(rows):
        if len(row) != n_cols:
            raise DataError(f"{spec.path}:{line_no}: expected {n_cols} fields, "
                            f"found {len(row)}")
        label = row[label_idx].strip()
        if not label:
            raise DataError(f"{spec.path}:{line_no}: missing label in column "
                            f"{col_name(label_idx)!r}")
        raw_labels.append(label)
        for k, j in enumerate(feat_idx):
            cell = row[j].strip()
            value = _finite_or_none(cell)
            if value is None:
                what = "missing value" if not cell else f"invalid value {cell!r}"
                raise DataError(f"{spec.path}: row {line_no}, column "
                                f"{col_name(j)!r}: {what}")
            X[r, k] = value

    class_names = tuple(dict.fromkeys(raw_labels))
    index = {name: i for i, name in enumerate(class_names)}
    y = np.array([index[v] for v in raw_labels], dtype=np.int64)
    return LabeledDataset(X, y, class_names, feature_names)


def load_wdbc(path) -> LabeledDataset:
    return load_csv(wdbc_spec(path))


def export_bundled_wdbc(path) -> Path:
    """Write scikit-learn's bundled copy of the WDBC data in UCI layout.

    The bundled copy carries no sample ids, so 1-based row numbers are used.
    """
    from sklearn.datasets import load_breast_cancer

    from ._io import atomic_write_text

    bunch = load_breast_cancer()
    # sklearn target 0 = malignant, 1 = benign
    diagnosis = np.where(bunch.target == 0, "M", "B")
    lines = []
    for i, (row, dx) in enumerate(zip(bunch.data, diagnosis), start=1):
        lines.append(",".join([str(i), dx] + [repr(float(v)) for v in row]))
    path = Path(path)
    atomic_write_text(path, "\n".join(lines) + "\n")
    return path


# -- splitting -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    seed: int
    assignments: np.ndarray

    def folds(self):
        """Yield ``(train_idx, test_idx)`` per fold, in fold order."""
        for f in range(self.k):
            yield (np.flatnonzero(self.assignments != f),
                   np.flatnonzero(self.assignments == f))


def _check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def stratified_folds(labels, k=5, seed=42, class_names=None) -> FoldPlan:
    """Assign each sample to one of ``k`` folds, stratified by class.

    Each class is shuffled and dealt round-robin; the dealing position
    carries over between classes so fold sizes also differ by at most one.
    """
    y = np.asarray(labels, dtype=np.int64)
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ParameterError(f"fold count must be an integer >= 2, got {k!r}")
    rng = np.random.default_rng(_check_seed(seed))
    assignments = np.empty(y.shape[0], dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        if members.size < k:
            name = class_names[c] if class_names is not None else str(c)
            raise InvalidInputError(
                f"class {name!r} has {members.size} samples, fewer than k={k}")
        members = rng.permutation(members)
        assignments[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    assignments.setflags(write=False)
    return FoldPlan(int(k), int(seed), assignments)


def split_indices(labels, test_fraction=0.2, seed=42):
    """Stratified, seeded hold-out split of sample indices.

    Each class contributes ``round(test_fraction * n_c)`` samples to the
    test set, bounded so at least one stays in training. Returns sorted
    ``(train_idx, test_idx)``.
    """
    try:
        frac = float(test_fraction)
    except (TypeError, ValueError):
        raise ParameterError(
            f"test_fraction must be a real, got {test_fraction!r}") from None
    if not 0.0 < frac < 1.0:
        raise ParameterError(f"test_fraction must lie in (0, 1), got {frac}")
    y = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(_check_seed(seed))
    mask = np.zeros(y.shape[0], dtype=bool)
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        n_test = min(int(math.floor(frac * members.size + 0.5)), members.size - 1)
        mask[rng.permutation(members)[:n_test]] = True
    return np.flatnonzero(~mask), np.flatnonzero(mask)


def split_train_test(dataset: LabeledDataset, test_fraction=0.2, seed=42):
    """Stratified hold-out split of a dataset; returns ``(train, test)``."""
    train_idx, test_idx = split_indices(dataset.labels, test_fraction, seed)
    return dataset.subset(train_idx), dataset.subset(test_idx)


def load_feature_matrix(path, feature_names, delimiter=","):
    """Read the named columns of a headed CSV as a float matrix.

    Other columns (ids, labels) are ignored, so a training file can be
    fed back for prediction.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh, delimiter=delimiter)) if r]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: empty file, header expected")
    header = [h.strip() for h in rows[0][1]]
    missing = [f for f in feature_names if f not in header]
    if missing:
        raise DataError(f"{path}: missing feature column(s) {missing}")
    cols = [header.index(f) for f in feature_names]
    X = np.empty((len(rows) - 1, len(cols)))
    for r, (line_no, row) in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DataError(f"{path}:{line_no}: expected {len(header)} fields, "
                            f"found {len(row)}")
        for k, j in enumerate(cols):
            cell = row[j].strip()
            value = _finite_or_none(cell)
            if value is None:
                raise DataError(f"{path}: row {line_no}, column {header[j]!r}: "
                                f"invalid value {cell!r}")
            X[r, k] = value
    return X
