"""Shared fixtures: small synthetic flow sets, fast training settings, capture CSVs."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from nbcoded.data import Dataset, load_schema, synthetic_flows
from nbcoded.neuralnet import TrainConfig
from nbcoded.pipeline import PipelineConfig


def capture_line(features: dict[str, float], service: str, label: int, attack: str | None = None) -> str:
    """One 49-column UNSW-NB15 capture row; unused numeric columns are 0."""
    cells = []
    for col in load_schema().columns:
        if col.name in features:
            cells.append(repr(float(features[col.name])))
        elif col.name == "service":
            cells.append("-" if service == "unknown" else service)
        elif col.name == "attack_cat":
            cells.append(attack or "")
        elif col.type == "label":
            cells.append(str(label))
        elif col.type == "numeric":
            cells.append("0")
        else:
            cells.append("x")
    return ",".join(cells)


def write_capture(path: Path, dataset: Dataset) -> Path:
    lines = [capture_line(dict(r.features), r.service, r.label, r.attack_family) for r in dataset]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def flows() -> Dataset:
    return synthetic_flows(1200, seed=3)


@pytest.fixture
def fast_train() -> TrainConfig:
    return TrainConfig(epochs=4, batch_size=64, patience=2)


@pytest.fixture
def fast_pipeline(fast_train: TrainConfig) -> PipelineConfig:
    return PipelineConfig(train=fast_train, services=None)


@pytest.fixture
def capture_csv(tmp_path: Path) -> Path:
    return write_capture(tmp_path / "capture.csv", synthetic_flows(400, seed=5))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
