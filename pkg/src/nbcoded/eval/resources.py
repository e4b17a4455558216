"""Disk, time and memory footprint of trained models."""

from __future__ import annotations

import os
import threading
import time
from types import TracebackType

import numpy as np
import psutil

from nbcoded.model_io import Model, section_sizes, serialize
from nbcoded.pipeline import Classifier, classify_batch

_PROCESS = psutil.Process(os.getpid())


def measure_model_disk(model: Model) -> float:
    """Serialized size in kilobytes (bytes / 1024).

    For an NBcoded model this is the encoder section plus the NB section
    plus the shared header, normalizer and offsets: the whole file.
    """
    return len(serialize(model)) / 1024.0


def disk_breakdown(model: Model) -> dict[str, int]:
    """Bytes per file section."""
    return section_sizes(model)


def measure_inference_time(model: Classifier, matrix: np.ndarray, repeats: int = 1) -> tuple[np.ndarray, float]:
    """Labels from classify_batch and the best-of-`repeats` wall-clock seconds per row."""
    X = np.asarray(matrix, dtype=np.float64)
    labels = np.empty(0, dtype=np.int8)
    if X.shape[0] == 0:
        return labels, 0.0
    best = float("inf")
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        labels = classify_batch(model, X)
        best = min(best, time.perf_counter() - start)
    return labels, best / X.shape[0]


def rss_mb() -> float:
    """Resident set size of this process in MB."""
    return _PROCESS.memory_info().rss / (1024 * 1024)


class RssMonitor:
    """Samples RSS on a background thread; peak_growth_mb is max RSS minus the RSS at entry."""

    def __init__(self, interval: float = 0.05) -> None:
        self.interval = interval
        self.baseline_mb = 0.0
        self.peak_mb = 0.0
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def _sample(self) -> None:
        while not self._stop.wait(self.interval):
            self.peak_mb = max(self.peak_mb, rss_mb())

    def __enter__(self) -> RssMonitor:
        self.baseline_mb = self.peak_mb = rss_mb()
        self._stop.clear()
        self._thread = threading.Thread(target=self._sample, name="rss-monitor", daemon=True)
        self._thread.start()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
        self.peak_mb = max(self.peak_mb, rss_mb())

    @property
    def peak_growth_mb(self) -> float:
        return max(0.0, self.peak_mb - self.baseline_mb)
