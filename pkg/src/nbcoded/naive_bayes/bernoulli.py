"""Bernoulli likelihoods over thresholded features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nbcoded.defaults import BERNOULLI_THRESHOLD, NB_ALPHA
from nbcoded.errors import FitError
from nbcoded.preprocess import FeatureMatrix

from ._base import CLASSES, ClassPrior, as_xy


@dataclass(frozen=True, eq=False)
class BernoulliNB:
    log_p: np.ndarray
    log_q: np.ndarray
    binarize_threshold: float
    alpha: float
    prior: ClassPrior

    family = "bernoulli"

    @property
    def n_features(self) -> int:
        return self.log_p.shape[1]

    def binarize(self, X: np.ndarray) -> np.ndarray:
        return (X > self.binarize_threshold).astype(np.float64)

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        b = self.binarize(X)
        return self.prior.log_prior[None, :] + b @ self.log_p.T + (1.0 - b) @ self.log_q.T


def fit_bernoulli(
    X: np.ndarray | FeatureMatrix,
    y: np.ndarray | None = None,
    alpha: float = NB_ALPHA,
    threshold: float = BERNOULLI_THRESHOLD,
) -> BernoulliNB:
    """p(feature=1 | c) = (count_1 + alpha) / (class_count + 2 alpha), value > threshold counts as 1."""
    if alpha < 0:
        raise FitError(f"alpha must be >= 0, got {alpha}")
    X, y = as_xy(X, y)
    b = X > threshold
    ones = np.array([b[y == c].sum(axis=0) for c in CLASSES], dtype=np.float64)
    counts = np.array([np.count_nonzero(y == c) for c in CLASSES], dtype=np.float64)[:, None]
    zeros = counts - ones
    if alpha == 0 and (np.any(ones == 0) or np.any(zeros == 0)):
        raise FitError("alpha=0 with a zero feature count would take log(0); use alpha > 0")
    denom = counts + 2.0 * alpha
    return BernoulliNB(
        log_p=np.log((ones + alpha) / denom),
        log_q=np.log((zeros + alpha) / denom),
        binarize_threshold=float(threshold),
        alpha=float(alpha),
        prior=ClassPrior.from_labels(y),
    )
