"""Boltzmann classifier: class centroids, L1 energies and temperature-scaled
Boltzmann probabilities, with evaluation tooling and a PDB featurizer."""

from .core import (BoltzmannModel, LabeledDataset, Metric, ScalerParams,
                   boltzmann_probabilities, energy, fit, fit_scaler, load_model,
                   predict, predict_batch, predict_proba, save_model, transform)
from .estimator import BoltzmannClassifier, MinMaxScaling

__version__ = "0.1.0"

__all__ = [
    "BoltzmannClassifier", "BoltzmannModel", "LabeledDataset", "Metric",
    "MinMaxScaling", "ScalerParams", "boltzmann_probabilities", "energy", "fit",
    "fit_scaler", "load_model", "predict", "predict_batch", "predict_proba",
    "save_model", "transform",
]
