"""Confusion counts and the four headline metrics."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from nbcoded.defaults import CONVENTIONS
from nbcoded.errors import ConfigError, DataError

log = logging.getLogger(__name__)

METRIC_NAMES: tuple[str, ...] = ("precision", "recall", "accuracy", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise DataError(f"confusion counts must be non-negative: {self}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class MetricsReport:
    """undefined names the ratios whose denominator was 0 (reported as 0.0)."""

    precision: float
    recall: float
    accuracy: float
    f1: float
    convention: str = "paper"
    undefined: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, object]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "convention": self.convention,
            "undefined": list(self.undefined),
        }


def confusion(predictions: np.ndarray, labels: np.ndarray) -> ConfusionMatrix:
    """Class 1 (attack) is the positive class."""
    pred = np.asarray(predictions)
    true = np.asarray(labels)
    if pred.shape != true.shape or pred.ndim != 1:
        raise DataError(f"predictions {pred.shape} and labels {true.shape} must be equal-length vectors")
    if not (np.isin(pred, (0, 1)).all() and np.isin(true, (0, 1)).all()):
        raise DataError("predictions and labels must be 0 or 1")
    pred_pos = pred == 1
    true_pos = true == 1
    return ConfusionMatrix(
        tp=int(np.count_nonzero(pred_pos & true_pos)),
        fp=int(np.count_nonzero(pred_pos & ~true_pos)),
        tn=int(np.count_nonzero(~pred_pos & ~true_pos)),
        fn=int(np.count_nonzero(~pred_pos & true_pos)),
    )


def _ratio(num: int | float, den: int | float, name: str, undefined: list[str]) -> float:
    if den == 0:
        undefined.append(name)
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix, convention: str = "paper") -> MetricsReport:
    """Precision, recall, accuracy and F1.

    The "paper" convention divides tp by (tp + fn) for precision and by
    (tp + fp) for recall; "standard" swaps the two. F1 and accuracy agree
    under both.
    """
    if convention not in CONVENTIONS:
        raise ConfigError(f"unknown metric convention {convention!r}; expected one of {list(CONVENTIONS)}")
    undefined: list[str] = []
    if convention == "paper":
        precision = _ratio(cm.tp, cm.tp + cm.fn, "precision", undefined)
        recall = _ratio(cm.tp, cm.tp + cm.fp, "recall", undefined)
    else:
        precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", undefined)
        recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", undefined)
    accuracy = _ratio(cm.tp + cm.tn, cm.total, "accuracy", undefined)
    f1 = _ratio(2.0 * precision * recall, precision + recall, "f1", undefined)
    if undefined:
        log.warning("undefined metric ratio(s) %s for %s; reported as 0", ", ".join(undefined), cm)
    return MetricsReport(
        precision=precision,
        recall=recall,
        accuracy=accuracy,
        f1=f1,
        convention=convention,
        undefined=tuple(undefined),
    )
