"""Service filter, feature selection, and min-max normalization."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from nbcoded.data.flows import Dataset
from nbcoded.defaults import FEATURES
from nbcoded.errors import FeatureError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Dense row-major float64 matrix of selected features.

    labels and row_ids are None for unlabelled input (prediction files).
    """

    values: np.ndarray
    column_names: tuple[str, ...]
    labels: np.ndarray | None = None
    row_ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(self.column_names):
            raise FeatureError(
                f"matrix shape {values.shape} does not match {len(self.column_names)} column names"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        for name in ("labels", "row_ids"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=np.int8 if name == "labels" else np.int64)
            if arr.shape != (values.shape[0],):
                raise FeatureError(f"{name} length {arr.shape[0]} != row count {values.shape[0]}")
            object.__setattr__(self, name, arr)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray, column_names: Sequence[str] | None = None) -> FeatureMatrix:
        return FeatureMatrix(
            values=values,
            column_names=tuple(column_names) if column_names is not None else self.column_names,
            labels=self.labels,
            row_ids=self.row_ids,
        )


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-column training extrema (X_min, X_max)."""

    column_names: tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self) -> None:
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != (len(self.column_names),) or maxs.shape != mins.shape:
            raise FeatureError("normalizer extrema do not match its columns")
        if np.any(mins > maxs):
            raise FeatureError("normalizer has min > max")
        for name, arr in (("mins", mins), ("maxs", maxs)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def transform(self, values: np.ndarray) -> np.ndarray:
        """(x - min) / (max - min), clamped to [0, 1]; constant columns map to 0."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != len(self.column_names):
            raise FeatureError(f"expected {len(self.column_names)} columns, got {values.shape[-1]}")
        span = self.maxs - self.mins
        constant = span == 0.0
        safe_span = np.where(constant, 1.0, span)
        scaled = (values - self.mins) / safe_span
        scaled = np.where(constant, 0.0, scaled)
        return np.clip(scaled, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def filter_services(dataset: Dataset, allowed: Iterable[str]) -> Dataset:
    """Keep rows whose service is in allowed, preserving order."""
    allowed_list = sorted(set(allowed))
    keep = np.flatnonzero(np.isin(dataset.services, np.array(allowed_list, dtype=object)))
    if len(keep) == 0:
        log.warning("service filter %s left no rows in %s", allowed_list, dataset.source_id)
    else:
        log.info("service filter %s: %d of %d rows kept", allowed_list, len(keep), len(dataset))
    return dataset.take(keep)


def select_features(dataset: Dataset, names: Sequence[str] = FEATURES) -> FeatureMatrix:
    """Matrix of the named columns, in the given order."""
    names = tuple(names)
    unknown = [n for n in names if n not in dataset.feature_names]
    if unknown:
        raise FeatureError(f"unknown feature name(s): {', '.join(unknown)}", names=unknown)
    positions = [dataset.feature_names.index(n) for n in names]
    return FeatureMatrix(
        values=dataset.features[:, positions],
        column_names=names,
        labels=dataset.labels,
        row_ids=dataset.row_ids,
    )


def fit_normalizer(train: FeatureMatrix) -> Normalizer:
    """Exact column-wise min/max of the training rows."""
    if train.n_rows < 1:
        raise FeatureError("cannot fit a normalizer on an empty matrix")
    return Normalizer(
        column_names=train.column_names,
        mins=train.values.min(axis=0),
        maxs=train.values.max(axis=0),
    )


def apply_normalizer(norm: Normalizer, matrix: FeatureMatrix) -> FeatureMatrix:
    if matrix.column_names != norm.column_names:
        raise FeatureError(
            f"column mismatch: normalizer fitted on {list(norm.column_names)}, "
            f"got {list(matrix.column_names)}"
        )
    return matrix.with_values(norm.transform(matrix.values))
