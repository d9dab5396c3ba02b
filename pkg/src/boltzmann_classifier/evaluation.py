"""Cross-validation, hold-out evaluation and temperature sweeps."""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass

import numpy as np

from . import core
from .baselines import baseline_knn, baseline_logreg, baseline_nearest_centroid
from .core import BoltzmannModel, LabeledDataset
from .data import FoldPlan
from .exceptions import ParameterError, ShapeError, UnsupportedError
from .metrics import EvalReport

DEFAULT_KT_GRID = tuple(float(v) for v in np.geomspace(0.05, 5.0, 10))

# reported in the original study, not recomputed here
PAPER_SVM_ACCURACY = {"bcw": 0.98, "cobalt": 0.86}


def _align_labels(model: BoltzmannModel, test: LabeledDataset) -> np.ndarray:
    if test.feature_names != model.feature_names:
        raise ShapeError("test features do not match the model's feature schema")
    if test.class_names == model.class_names:
        return test.labels
    index = {name: i for i, name in enumerate(model.class_names)}
    unknown = [n for n in test.class_names if n not in index]
    if unknown:
        raise ShapeError(f"test classes unknown to the model: {unknown}")
    remap = np.array([index[n] for n in test.class_names], dtype=np.int64)
    return remap[test.labels]


def evaluate(model: BoltzmannModel, test: LabeledDataset) -> EvalReport:
    y_true = _align_labels(model, test)
    preds, probs = core.predict_batch(model, test.features, apply_scaler=True)
    return EvalReport.build("boltzmann", y_true, preds, model.class_names,
                            probabilities=probs,
                            params={"kT": model.kT, "metric": model.metric.value})


@dataclass(frozen=True, eq=False)
class CVResult:
    folds: list
    plan: FoldPlan

    @property
    def accuracies(self):
        return [r.accuracy for r in self.folds]

    @property
    def mean_accuracy(self) -> float:
        return statistics.fmean(self.accuracies)

    @property
    def std_accuracy(self) -> float:
        return statistics.stdev(self.accuracies) if len(self.folds) > 1 else 0.0

    def to_dict(self):
        return {
            "k": self.plan.k,
            "seed": self.plan.seed,
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "folds": [r.to_dict() for r in self.folds],
        }

    def to_text(self):
        lines = [f"{self.plan.k}-fold CV (seed {self.plan.seed})",
                 f"accuracy  {self.mean_accuracy:.4f} +/- {self.std_accuracy:.4f}"]
        for i, acc in enumerate(self.accuracies):
            lines.append(f"  fold {i}  {acc:.4f}")
        return "\n".join(lines)


def cross_validate(dataset: LabeledDataset, plan: FoldPlan, kT=1.0, metric="l1"):
    """Refit scaler and centroids on each training fold; evaluate the held-out fold."""
    if plan.assignments.shape[0] != dataset.n_samples:
        raise ShapeError("fold plan does not match the dataset size")
    reports = []
    for train_idx, test_idx in plan.folds():
        model = core.fit(dataset.subset(train_idx), kT=kT, metric=metric)
        reports.append(evaluate(model, dataset.subset(test_idx)))
    return CVResult(reports, plan)


@dataclass(frozen=True, eq=False)
class KTSweepResult:
    kt_grid: np.ndarray
    mean_abs_delta_correct: np.ndarray
    accuracy: np.ndarray

    def rows(self):
        for kT, dp, acc in zip(self.kt_grid, self.mean_abs_delta_correct, self.accuracy):
            yield float(kT), float(dp), float(acc)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kT", "mean_abs_delta_correct", "accuracy"])
        for kT, dp, acc in self.rows():
            writer.writerow([repr(kT), repr(dp), repr(acc)])
        return buf.getvalue()

    def to_dict(self):
        return {"kT": self.kt_grid.tolist(),
                "mean_abs_delta_correct": self.mean_abs_delta_correct.tolist(),
                "accuracy": self.accuracy.tolist()}


def kt_sweep(train: LabeledDataset, test: LabeledDataset, kt_grid=DEFAULT_KT_GRID,
             metric="l1") -> KTSweepResult:
    """Fit centroids once on ``train`` and re-score ``test`` at each kT."""
    grid = np.asarray(kt_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("kT grid must be a non-empty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ParameterError("kT grid must be positive and strictly increasing")
    if train.n_classes != 2:
        raise UnsupportedError("kT sweep reports a two-class delta probability")
    base = core.fit(train, kT=float(grid[0]), metric=metric)
    deltas, accs = [], []
    for kT in grid:
        report = evaluate(base.with_kt(kT), test)
        dp = report.delta.mean_abs_correct
        deltas.append(np.nan if dp is None else dp)
        accs.append(report.accuracy)
    return KTSweepResult(grid, np.asarray(deltas), np.asarray(accs))


def compare_methods(train: LabeledDataset, test: LabeledDataset, kT=1.0,
                    metric="l1", knn_k=5, l2=1e-4) -> dict:
    """Hold-out accuracy of the Boltzmann classifier next to the baselines."""
    reports = {"boltzmann": evaluate(core.fit(train, kT=kT, metric=metric), test),
               "nearest_centroid": baseline_nearest_centroid(train, test),
               "knn": baseline_knn(train, test, k=knn_k)}
    if train.n_classes == 2:
        reports["logistic_regression"] = baseline_logreg(train, test, l2=l2)
    return reports


def comparison_text(reports: dict) -> str:
    width = max(len(name) for name in reports) + 2
    lines = [f"{'method':<{width}}accuracy"]
    for name, report in reports.items():
        lines.append(f"{name:<{width}}{report.accuracy:.4f}")
    lines.append(f"{'svm':<{width}}not recomputed "
                 f"(originally reported 98% BCW / 86% cobalt)")
    return "\n".join(lines)


def report_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=_jsonable) + "\n"


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")
