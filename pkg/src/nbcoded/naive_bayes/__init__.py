"""Naive Bayes classifiers: MAP prediction over log-domain class scores."""

from __future__ import annotations

from typing import Union

import numpy as np

from nbcoded.errors import ConfigError
from nbcoded.preprocess import FeatureMatrix

from ._base import CLASSES, ClassPrior, as_rows
from .bernoulli import BernoulliNB, fit_bernoulli
from .complement import ComplementNB, fit_complement
from .gaussian import GaussianNB, fit_gaussian

NBModel = Union[GaussianNB, BernoulliNB, ComplementNB]

FAMILIES: dict[str, type] = {
    "gaussian": GaussianNB,
    "bernoulli": BernoulliNB,
    "complement": ComplementNB,
}


def fit_nb(family: str, X: np.ndarray | FeatureMatrix, y: np.ndarray | None = None, **params: float) -> NBModel:
    """Fit the named family with its keyword parameters (alpha, threshold, var_smoothing)."""
    if family == "gaussian":
        return fit_gaussian(X, y, **params)
    if family == "bernoulli":
        return fit_bernoulli(X, y, **params)
    if family == "complement":
        return fit_complement(X, y, **params)
    raise ConfigError(f"unknown Naive Bayes family {family!r}; expected one of {sorted(FAMILIES)}")


def log_posterior(model: NBModel, x: np.ndarray) -> np.ndarray:
    """Unnormalized per-class scores for a vector (shape (2,)) or matrix (shape (n, 2))."""
    rows, single = as_rows(x, model.n_features)
    scores = model.joint_log_likelihood(rows)
    return scores[0] if single else scores


def predict(model: NBModel, x: np.ndarray) -> np.ndarray | int:
    """Argmax class; exact ties go to class 0 (normal)."""
    scores = log_posterior(model, x)
    if scores.ndim == 1:
        return int(np.argmax(scores))
    return np.argmax(scores, axis=1).astype(np.int8)


__all__ = [
    "CLASSES", "ClassPrior", "NBModel", "FAMILIES",
    "GaussianNB", "BernoulliNB", "ComplementNB",
    "fit_gaussian", "fit_bernoulli", "fit_complement", "fit_nb",
    "log_posterior", "predict",
]
