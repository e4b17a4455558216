"""Stratified partitions of labelled data."""

from __future__ import annotations

import logging

import numpy as np

from nbcoded.errors import StratifyError

from .flows import Dataset

log = logging.getLogger(__name__)

Seed = int | np.random.SeedSequence


def derive_seeds(seed: int, n: int) -> list[int]:
    """n independent child seeds from one top-level seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def stratified_indices(labels: np.ndarray, train_fraction: float, seed: Seed) -> tuple[np.ndarray, np.ndarray]:
    """Row positions (train, test) preserving per-class proportions.

    Each class contributes floor(n_c * f) or one more to the train part; the
    leftover records are handed out by largest fractional remainder, ties
    broken by the seeded generator. Both parts come back in input order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise StratifyError(f"train_fraction must be in (0, 1), got {train_fraction}")
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) < 2:
        raise StratifyError(f"cannot stratify: only class(es) {classes.tolist()} present")
    small = [int(c) for c, n in zip(classes, counts) if n < 2]
    if small:
        raise StratifyError(f"cannot stratify: class(es) {small} have fewer than 2 records")

    rng = np.random.default_rng(seed)
    target = counts * train_fraction
    n_train = np.floor(target).astype(np.int64)
    leftover = int(round(len(labels) * train_fraction)) - int(n_train.sum())
    if leftover > 0:
        remainder = target - n_train
        # random keys only break ties between equal remainders
        order = np.lexsort((rng.random(len(classes)), -remainder))
        n_train[order[:leftover]] += 1
    n_train = np.clip(n_train, 1, counts - 1)

    train_parts: list[np.ndarray] = []
    test_parts: list[np.ndarray] = []
    for cls, k in zip(classes, n_train):
        members = np.flatnonzero(labels == cls)
        shuffled = rng.permutation(members)
        train_parts.append(shuffled[:k])
        test_parts.append(shuffled[k:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def stratified_split(dataset: Dataset, train_fraction: float, seed: Seed) -> tuple[Dataset, Dataset]:
    """Partition a dataset into (train, test) with matching class balance."""
    train_idx, test_idx = stratified_indices(dataset.labels, train_fraction, seed)
    log.debug("stratified split of %s: %d train / %d test", dataset.source_id, len(train_idx), len(test_idx))
    return dataset.take(train_idx), dataset.take(test_idx)
