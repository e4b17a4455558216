"""Repeated stratified shuffle-split evaluation.

k independent stratified splits at train_fraction, one derived seed per
split. The splits are not disjoint folds: 80/20 geometry and 10 disjoint
folds cannot both hold.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from nbcoded.data.flows import Dataset
from nbcoded.data.split import derive_seeds, stratified_indices
from nbcoded.defaults import CONVENTIONS, DEFAULT_SEED, K_SPLITS, TRAIN_FRACTION
from nbcoded.errors import ConfigError, NbcodedError
from nbcoded.pipeline import BareNBModel, Classifier, MLPModel, NBcodedModel, features_for

from .metrics import METRIC_NAMES, ConfusionMatrix, MetricsReport, confusion, metrics
from .resources import measure_inference_time, measure_model_disk

log = logging.getLogger(__name__)

ModelBuilder = Callable[[Dataset, int], Classifier]


@dataclass(frozen=True)
class FoldResult:
    fold: int
    seed: int
    n_train: int
    n_test: int
    confusion: ConfusionMatrix
    metrics: MetricsReport
    standard: MetricsReport
    train_seconds: float
    predict_seconds_per_row: float
    disk_kb: float | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def to_row(self, with_timings: bool = False) -> dict[str, object]:
        """Flat NDJSON row; timings are opt-in so reruns stay byte-identical."""
        row: dict[str, object] = {
            "fold": self.fold,
            "seed": self.seed,
            "n_train": self.n_train,
            "n_test": self.n_test,
            **self.confusion.to_dict(),
            "convention": self.metrics.convention,
        }
        for name in METRIC_NAMES:
            row[name] = getattr(self.metrics, name)
            row[f"standard_{name}"] = getattr(self.standard, name)
        row["undefined"] = list(self.metrics.undefined)
        if self.disk_kb is not None:
            row["disk_kb"] = self.disk_kb
        if with_timings:
            row["train_seconds"] = self.train_seconds
            row["predict_us_per_flow"] = self.predict_seconds_per_row * 1e6
        return row


@dataclass(frozen=True)
class CVResult:
    folds: tuple[FoldResult, ...]
    convention: str

    @property
    def k(self) -> int:
        return len(self.folds)

    @property
    def disk_kb(self) -> float | None:
        return self.folds[0].disk_kb if self.folds else None

    def values(self, name: str) -> np.ndarray:
        if name == "train_seconds":
            return np.array([f.train_seconds for f in self.folds])
        if name == "predict_seconds_per_row":
            return np.array([f.predict_seconds_per_row for f in self.folds])
        return np.array([getattr(f.metrics, name) for f in self.folds])

    def mean(self, name: str) -> float:
        return float(np.mean(self.values(name)))

    def std(self, name: str) -> float:
        """Population standard deviation across folds."""
        return float(np.std(self.values(name)))

    def summary(self) -> dict[str, object]:
        out: dict[str, object] = {"k": self.k, "convention": self.convention}
        for name in (*METRIC_NAMES, "train_seconds"):
            out[f"{name}_mean"] = self.mean(name)
            out[f"{name}_std"] = self.std(name)
        out["predict_us_per_flow"] = self.mean("predict_seconds_per_row") * 1e6
        out["disk_kb"] = self.disk_kb
        undefined = sorted({u for f in self.folds for u in f.metrics.undefined})
        if undefined:
            out["undefined"] = undefined
        return out

    def rows(self, with_timings: bool = False) -> Iterator[dict[str, object]]:
        for fold in self.folds:
            yield fold.to_row(with_timings)


def _disk_kb(model: Classifier) -> float | None:
    if isinstance(model, (NBcodedModel, BareNBModel, MLPModel)):
        return measure_model_disk(model)
    return None


def _run_fold(
    fold: int, seed: int, dataset: Dataset, builder: ModelBuilder, train_fraction: float, convention: str
) -> FoldResult:
    train_idx, test_idx = stratified_indices(dataset.labels, train_fraction, seed)
    train_set, test_set = dataset.take(train_idx), dataset.take(test_idx)
    start = time.perf_counter()
    try:
        model = builder(train_set, seed)
    except NbcodedError as exc:
        exc.stage = f"fold {fold}" + (f"/{exc.stage}" if exc.stage else "")
        raise
    wall = time.perf_counter() - start
    timings = dict(getattr(model, "timings", {}) or {})

    preds, predict_seconds_per_row = measure_inference_time(model, features_for(model, test_set))

    cm = confusion(preds, test_set.labels)
    return FoldResult(
        fold=fold,
        seed=seed,
        n_train=len(train_set),
        n_test=len(test_set),
        confusion=cm,
        metrics=metrics(cm, convention),
        standard=metrics(cm, "standard"),
        train_seconds=timings.get("total", wall),
        predict_seconds_per_row=predict_seconds_per_row,
        disk_kb=_disk_kb(model),
        timings=timings,
    )


def cross_validate(
    dataset: Dataset,
    model_builder: ModelBuilder,
    k: int = K_SPLITS,
    train_fraction: float = TRAIN_FRACTION,
    seed: int = DEFAULT_SEED,
    convention: str = "paper",
    jobs: int = 1,
) -> CVResult:
    """Train and score model_builder(train_set, fold_seed) on k stratified splits.

    Folds may run on `jobs` threads; results are always aggregated in fold
    order, so the outcome does not depend on `jobs`.
    """
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if convention not in CONVENTIONS:
        raise ConfigError(f"unknown metric convention {convention!r}; expected one of {list(CONVENTIONS)}")
    seeds = derive_seeds(seed, k)
    log.debug("cross-validation seeds: %s", seeds)

    def run(fold: int) -> FoldResult:
        result = _run_fold(fold, seeds[fold], dataset, model_builder, train_fraction, convention)
        log.info(
            "fold %d/%d: f1 %.4f, accuracy %.4f, trained in %.2fs",
            fold + 1, k, result.metrics.f1, result.metrics.accuracy, result.train_seconds,
        )
        return result

    if jobs == 1:
        folds = [run(i) for i in range(k)]
    else:
        with ThreadPoolExecutor(max_workers=jobs, thread_name_prefix="fold") as pool:
            folds = list(pool.map(run, range(k)))
    return CVResult(folds=tuple(folds), convention=convention)
