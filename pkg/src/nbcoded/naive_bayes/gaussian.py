"""Gaussian likelihoods with variance smoothing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nbcoded.defaults import GAUSSIAN_VAR_FLOOR, GAUSSIAN_VAR_SMOOTHING
from nbcoded.errors import FitError
from nbcoded.preprocess import FeatureMatrix

from ._base import CLASSES, ClassPrior, as_xy

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class GaussianNB:
    mean: np.ndarray
    variance: np.ndarray
    prior: ClassPrior

    family = "gaussian"

    @property
    def n_features(self) -> int:
        return self.mean.shape[1]

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        # (n, 1, f) against (1, 2, f)
        diff = X[:, None, :] - self.mean[None, :, :]
        ll = -0.5 * (_LOG_2PI + np.log(self.variance))[None, :, :] - diff**2 / (2.0 * self.variance[None, :, :])
        return self.prior.log_prior[None, :] + ll.sum(axis=2)


def fit_gaussian(
    X: np.ndarray | FeatureMatrix,
    y: np.ndarray | None = None,
    var_smoothing: float = GAUSSIAN_VAR_SMOOTHING,
) -> GaussianNB:
    """Per-class population mean and variance, plus class-frequency priors.

    Every variance is increased by max(var_smoothing * largest variance,
    GAUSSIAN_VAR_FLOOR) so constant columns stay usable.
    """
    X, y = as_xy(X, y)
    mean = np.empty((len(CLASSES), X.shape[1]))
    var = np.empty_like(mean)
    for k, c in enumerate(CLASSES):
        rows = X[y == c]
        if rows.shape[0] < 2:
            raise FitError(f"class {c} needs at least 2 rows for a Gaussian fit, got {rows.shape[0]}")
        mean[k] = rows.mean(axis=0)
        var[k] = ((rows - mean[k]) ** 2).mean(axis=0)
    epsilon = max(var_smoothing * float(var.max()), GAUSSIAN_VAR_FLOOR)
    return GaussianNB(mean=mean, variance=var + epsilon, prior=ClassPrior.from_labels(y))
