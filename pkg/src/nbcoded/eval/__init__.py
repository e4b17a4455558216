from .crossval import CVResult, FoldResult, ModelBuilder, cross_validate
from .experiments import (
    EXPERIMENTS,
    ExperimentReport,
    ExperimentSettings,
    bare_builder,
    builder_for,
    mlp_builder,
    model_label,
    nbcoded_builder,
    run_experiment,
)
from .metrics import METRIC_NAMES, ConfusionMatrix, MetricsReport, confusion, metrics
from .resources import RssMonitor, disk_breakdown, measure_inference_time, measure_model_disk, rss_mb

__all__ = [
    "ConfusionMatrix", "MetricsReport", "METRIC_NAMES", "confusion", "metrics",
    "CVResult", "FoldResult", "ModelBuilder", "cross_validate",
    "measure_model_disk", "disk_breakdown", "measure_inference_time", "RssMonitor", "rss_mb",
    "EXPERIMENTS", "ExperimentSettings", "ExperimentReport", "run_experiment",
    "builder_for", "nbcoded_builder", "bare_builder", "mlp_builder", "model_label",
]
