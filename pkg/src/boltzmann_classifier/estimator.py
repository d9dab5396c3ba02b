"""scikit-learn estimators over the functional core, usable in pipelines,
``cross_val_score`` and ``GridSearchCV``."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import core
from .core import BoltzmannModel, LabeledDataset


def _check_features(est, X):
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != est.n_features_in_:
        raise ValueError(f"X has {X.shape[1]} features, but {type(est).__name__} "
                         f"is expecting {est.n_features_in_} features as input")
    return X


class MinMaxScaling(TransformerMixin, BaseEstimator):
    """Per-column MinMax scaling fitted on training data.

    Constant columns map to 0 and unseen values are not clipped.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.params_ = core.fit_scaler(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return core.transform(self.params_, _check_features(self, X))


class BoltzmannClassifier(ClassifierMixin, BaseEstimator):
    """Energy-based nearest-centroid classifier.

    The energy of class ``c`` is the L1 (or L2) distance between a MinMax
    scaled sample and the class mean; probabilities are the Boltzmann
    weights ``exp(-E_c / kT)`` normalized over classes.

    Parameters
    ----------
    kT : float, default=1.0
        Temperature. Small values sharpen probabilities toward the lowest
        energy class, large values flatten them toward uniform. Predicted
        labels do not depend on it.
    metric : {"l1", "l2"}, default="l1"
        Distance used as the energy.

    Attributes
    ----------
    classes_ : ndarray of shape (n_classes,)
    model_ : BoltzmannModel
        Fitted centroids and scaler; serializable via
        :func:`boltzmann_classifier.core.save_model`.
    """

    def __init__(self, kT=1.0, metric="l1"):
        self.kT = kT
        self.metric = metric

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        check_classification_targets(y)
        self.classes_, encoded = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        names = tuple(f"x{i}" for i in range(X.shape[1]))
        dataset = LabeledDataset(X, encoded, tuple(map(str, self.classes_)), names)
        self.model_ = core.fit(dataset, kT=self.kT, metric=self.metric)
        return self

    @classmethod
    def from_model(cls, model: BoltzmannModel):
        """Wrap an already fitted (e.g. loaded) model; classes are its names."""
        est = cls(kT=model.kT, metric=model.metric.value)
        est.model_ = model
        est.classes_ = np.asarray(model.class_names)
        est.n_features_in_ = model.n_features
        return est

    def energy(self, X):
        check_is_fitted(self, "model_")
        X = core.transform(self.model_.scaler, _check_features(self, X))
        return core.energy(self.model_, X)

    def predict_proba(self, X):
        check_is_fitted(self, "model_")
        _, probs = core.predict_batch(self.model_, _check_features(self, X))
        return probs

    def predict_log_proba(self, X):
        with np.errstate(divide="ignore"):
            return np.log(self.predict_proba(X))

    def predict(self, X):
        check_is_fitted(self, "model_")
        labels, _ = core.predict_batch(self.model_, _check_features(self, X))
        return self.classes_[labels]
