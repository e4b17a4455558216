from __future__ import annotations

import numpy as np

from nbcoded.eval import RssMonitor, disk_breakdown, measure_inference_time, measure_model_disk, rss_mb
from nbcoded.model_io import EmptyModel, serialize
from nbcoded.pipeline import classify_batch, train_bare_nb


def test_empty_model_disk():
    assert measure_model_disk(EmptyModel()) == 15 / 1024


def test_disk_matches_serialized_size(flows, fast_pipeline):
    model = train_bare_nb(flows, "gaussian", fast_pipeline)
    assert measure_model_disk(model) == len(serialize(model)) / 1024
    breakdown = disk_breakdown(model)
    assert sum(breakdown.values()) == len(serialize(model))
    assert "encoder" not in breakdown


def test_inference_time(flows, fast_pipeline):
    model = train_bare_nb(flows, "bernoulli", fast_pipeline)
    labels, seconds = measure_inference_time(model, flows.features, repeats=2)
    assert seconds > 0.0
    np.testing.assert_array_equal(labels, classify_batch(model, flows.features))

    labels, seconds = measure_inference_time(model, np.empty((0, 9)))
    assert labels.shape == (0,)
    assert seconds == 0.0


def test_rss_monitor():
    assert rss_mb() > 0.0
    with RssMonitor(interval=0.01) as monitor:
        block = np.ones((2_000, 2_000))
        block.sum()
    assert monitor.peak_mb >= monitor.baseline_mb > 0.0
    assert monitor.peak_growth_mb >= 0.0
