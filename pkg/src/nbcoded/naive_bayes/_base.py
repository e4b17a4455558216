"""Shared pieces of the three Naive Bayes families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nbcoded.errors import FeatureError, FitError
from nbcoded.preprocess import FeatureMatrix

CLASSES = (0, 1)


@dataclass(frozen=True, eq=False)
class ClassPrior:
    log_prior: np.ndarray
    class_count: np.ndarray

    @classmethod
    def from_labels(cls, y: np.ndarray) -> ClassPrior:
        counts = np.array([np.count_nonzero(y == c) for c in CLASSES], dtype=np.int64)
        return cls(log_prior=np.log(counts / counts.sum()), class_count=counts)


def as_xy(X: np.ndarray | FeatureMatrix, y: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    """Unpack and validate a binary-labelled design matrix."""
    if isinstance(X, FeatureMatrix):
        if y is None:
            y = X.labels
        X = X.values
    if y is None:
        raise FitError("labels are required to fit a Naive Bayes model")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise FitError(f"expected a 2-D matrix, got shape {X.shape}")
    if len(y) != X.shape[0]:
        raise FitError(f"{X.shape[0]} rows but {len(y)} labels")
    if not np.isin(y, CLASSES).all():
        raise FitError("labels must be 0 or 1")
    present = {int(c) for c in np.unique(y)}
    if present != set(CLASSES):
        raise FitError(f"both classes must be present to fit, got only {sorted(present)}")
    return X, y


def as_rows(x: np.ndarray, n_features: int) -> tuple[np.ndarray, bool]:
    """Coerce a vector or matrix to 2-D; the flag is True for a single vector."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    rows = arr.reshape(1, -1) if single else arr
    if rows.ndim != 2 or rows.shape[1] != n_features:
        raise FeatureError(f"expected {n_features} features, got shape {arr.shape}")
    return rows, single
