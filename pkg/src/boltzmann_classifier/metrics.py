"""Evaluation records: confusion matrix, delta-probability statistics and
the report object shared by the Boltzmann classifier and the baselines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ShapeError

HISTOGRAM_BINS = 20


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts with rows = true class, columns = predicted class."""

    counts: np.ndarray
    class_names: tuple

    @classmethod
    def from_predictions(cls, y_true, y_pred, class_names):
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        if y_true.shape != y_pred.shape:
            raise ShapeError("y_true and y_pred differ in length")
        C = len(class_names)
        counts = np.zeros((C, C), dtype=np.int64)
        np.add.at(counts, (y_true, y_pred), 1)
        return cls(counts, tuple(class_names))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        total = self.total
        return float(np.trace(self.counts)) / total if total else float("nan")

    def to_dict(self):
        return {"class_names": list(self.class_names),
                "counts": self.counts.tolist()}

    def to_text(self):
        names = [str(n) for n in self.class_names]
        width = max([len(n) for n in names] + [len(str(self.counts.max(initial=0))), 4])
        lines = [" " * (width + 2) + " ".join(n.rjust(width) for n in names)]
        for name, row in zip(names, self.counts):
            lines.append(name.rjust(width) + "  " +
                         " ".join(str(v).rjust(width) for v in row))
        return "\n".join(lines)


def _mean_or_none(values):
    return float(np.mean(values)) if len(values) else None


@dataclass(frozen=True, eq=False)
class DeltaProbStats:
    """Per-sample ``P(class 0) - P(class 1)`` split by prediction outcome."""

    deltas: np.ndarray
    correct: np.ndarray
    bin_edges: np.ndarray
    hist_correct: np.ndarray
    hist_misclassified: np.ndarray

    @classmethod
    def from_probabilities(cls, probabilities, y_true, y_pred, bins=HISTOGRAM_BINS):
        P = np.asarray(probabilities, dtype=np.float64)
        if P.ndim != 2 or P.shape[1] != 2:
            raise ShapeError("delta probabilities need exactly two classes")
        deltas = P[:, 0] - P[:, 1]
        correct = np.asarray(y_true) == np.asarray(y_pred)
        edges = np.linspace(-1.0, 1.0, bins + 1)
        clipped = np.clip(deltas, -1.0, 1.0)
        hist_c, _ = np.histogram(clipped[correct], bins=edges)
        hist_m, _ = np.histogram(clipped[~correct], bins=edges)
        return cls(deltas, correct, edges, hist_c, hist_m)

    @property
    def mean_abs_correct(self) -> Optional[float]:
        return _mean_or_none(np.abs(self.deltas[self.correct]))

    @property
    def mean_abs_misclassified(self) -> Optional[float]:
        return _mean_or_none(np.abs(self.deltas[~self.correct]))

    def to_dict(self):
        return {
            "mean_abs_delta_correct": self.mean_abs_correct,
            "mean_abs_delta_misclassified": self.mean_abs_misclassified,
            "n_correct": int(self.correct.sum()),
            "n_misclassified": int((~self.correct).sum()),
            "histogram": {
                "bin_edges": self.bin_edges.tolist(),
                "correct": self.hist_correct.tolist(),
                "misclassified": self.hist_misclassified.tolist(),
            },
        }

    def histogram_rows(self):
        for lo, hi, c, m in zip(self.bin_edges[:-1], self.bin_edges[1:],
                                self.hist_correct, self.hist_misclassified):
            yield float(lo), float(hi), int(c), int(m)


@dataclass(frozen=True, eq=False)
class EvalReport:
    method: str
    confusion: ConfusionMatrix
    predictions: np.ndarray
    probabilities: Optional[np.ndarray] = None
    delta: Optional[DeltaProbStats] = None
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, method, y_true, y_pred, class_names, probabilities=None,
              params=None):
        confusion = ConfusionMatrix.from_predictions(y_true, y_pred, class_names)
        delta = None
        if probabilities is not None and len(class_names) == 2:
            delta = DeltaProbStats.from_probabilities(probabilities, y_true, y_pred)
        return cls(method, confusion, np.asarray(y_pred, dtype=np.int64),
                   probabilities, delta, dict(params or {}))

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    @property
    def n_samples(self) -> int:
        return self.confusion.total

    def to_dict(self):
        doc = {
            "method": self.method,
            "params": self.params,
            "n_samples": self.n_samples,
            "accuracy": self.accuracy,
            "confusion_matrix": self.confusion.to_dict(),
        }
        if self.delta is not None:
            doc["delta_probability"] = self.delta.to_dict()
        return doc

    def to_text(self):
        lines = [f"method        {self.method}",
                 f"samples       {self.n_samples}",
                 f"accuracy      {self.accuracy:.4f}"]
        if self.delta is not None:
            for label, value in (("|dp| correct", self.delta.mean_abs_correct),
                                 ("|dp| wrong", self.delta.mean_abs_misclassified)):
                lines.append(f"{label:<14}" + ("n/a" if value is None else f"{value:.4f}"))
        lines += ["", self.confusion.to_text()]
        return "\n".join(lines)
