"""Complement Naive Bayes for imbalanced, non-negative features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nbcoded.defaults import NB_ALPHA
from nbcoded.errors import FeatureError, FitError
from nbcoded.preprocess import FeatureMatrix

from ._base import CLASSES, ClassPrior, as_xy


@dataclass(frozen=True, eq=False)
class ComplementNB:
    weight: np.ndarray
    alpha: float
    prior: ClassPrior

    family = "complement"

    @property
    def n_features(self) -> int:
        return self.weight.shape[1]

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        if np.any(X < 0):
            raise FeatureError("Complement NB inputs must be non-negative; translate the features first")
        # each class is scored by how poorly its complement explains x
        return -(X @ self.weight.T)


def fit_complement(
    X: np.ndarray | FeatureMatrix,
    y: np.ndarray | None = None,
    alpha: float = NB_ALPHA,
) -> ComplementNB:
    """w[c, i] = log((alpha + S_i) / (n alpha + sum_j S_j)), S summed over rows not in c.

    Weights are kept unnormalized; priors are stored but not used to score.
    """
    if alpha <= 0:
        raise FitError(f"alpha must be > 0, got {alpha}")
    X, y = as_xy(X, y)
    if np.any(X < 0):
        raise FitError(
            "Complement NB needs non-negative inputs; translate the features "
            "(add a per-feature offset) before fitting"
        )
    n_features = X.shape[1]
    weight = np.empty((len(CLASSES), n_features))
    for k, c in enumerate(CLASSES):
        comp = X[y != c].sum(axis=0)
        weight[k] = np.log((alpha + comp) / (n_features * alpha + comp.sum()))
    return ComplementNB(weight=weight, alpha=float(alpha), prior=ClassPrior.from_labels(y))
