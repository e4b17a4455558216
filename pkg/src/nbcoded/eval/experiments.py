"""The three evaluation campaigns: bare NB baselines, NBcoded vs bare NB, NBcoded vs MLP."""

from __future__ import annotations

import logging
from contextlib import nullcontext
from dataclasses import dataclass, field, replace

from nbcoded.data.flows import Dataset
from nbcoded.defaults import DEFAULT_SEED, K_SPLITS, NB_FAMILIES, TRAIN_FRACTION
from nbcoded.errors import ConfigError
from nbcoded.pipeline import PipelineConfig, train_bare_nb, train_mlp_baseline, train_nbcoded

from .crossval import CVResult, ModelBuilder, cross_validate
from .resources import RssMonitor

log = logging.getLogger(__name__)

EXPERIMENTS: tuple[str, ...] = ("baselines", "nbcoded", "comparison")


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def nbcoded_builder(family: str, config: PipelineConfig | None = None) -> ModelBuilder:
    base = config or PipelineConfig()
    base.nb_params(family)
    return lambda train_set, seed: train_nbcoded(train_set, family, replace(base, seed=seed))


def bare_builder(family: str, config: PipelineConfig | None = None) -> ModelBuilder:
    base = config or PipelineConfig()
    base.nb_params(family)
    return lambda train_set, seed: train_bare_nb(train_set, family, replace(base, seed=seed))


def mlp_builder(config: PipelineConfig | None = None) -> ModelBuilder:
    base = config or PipelineConfig()
    return lambda train_set, seed: train_mlp_baseline(train_set, replace(base, seed=seed))


def builder_for(kind: str, family: str = "gaussian", config: PipelineConfig | None = None) -> ModelBuilder:
    if kind == "nbcoded":
        return nbcoded_builder(family, config)
    if kind == "nb":
        return bare_builder(family, config)
    if kind == "mlp":
        return mlp_builder(config)
    raise ConfigError(f"unknown model kind {kind!r}; expected nbcoded, nb or mlp")


def model_label(kind: str, family: str = "gaussian") -> str:
    return "mlp" if kind == "mlp" else f"{kind}-{family}"


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSettings:
    k: int = K_SPLITS
    train_fraction: float = TRAIN_FRACTION
    seed: int = DEFAULT_SEED
    convention: str = "paper"
    jobs: int = 1
    families: tuple[str, ...] = NB_FAMILIES
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    rows: tuple[dict[str, object], ...]
    results: dict[str, CVResult]

    def fold_rows(self, with_timings: bool = False) -> list[dict[str, object]]:
        """Every fold of every model, tagged with the model label, in run order."""
        out: list[dict[str, object]] = []
        for label, cv in self.results.items():
            out.extend({"model": label, **row} for row in cv.rows(with_timings))
        return out

    def to_dict(self) -> dict[str, object]:
        return {"experiment": self.name, "models": list(self.rows)}


def _evaluate(
    kind: str, family: str, dataset: Dataset, settings: ExperimentSettings, monitor_memory: bool = False
) -> tuple[dict[str, object], CVResult]:
    label = model_label(kind, family)
    builder = builder_for(kind, family, settings.pipeline)
    monitor = RssMonitor()
    with monitor if monitor_memory else nullcontext():
        cv = cross_validate(
            dataset, builder, settings.k, settings.train_fraction, settings.seed, settings.convention, settings.jobs
        )
    row: dict[str, object] = {"model": label, **cv.summary()}
    if monitor_memory:
        row["peak_rss_growth_mb"] = monitor.peak_growth_mb
    log.info("%s: f1 %.4f +/- %.4f over %d splits", label, cv.mean("f1"), cv.std("f1"), cv.k)
    return row, cv


def run_experiment(name: str, dataset: Dataset, settings: ExperimentSettings | None = None) -> ExperimentReport:
    """Run one campaign on already preprocessed flows.

    baselines   bare NB for each family
    nbcoded     bare NB and NBcoded per family on the same splits, with the
                F1 improvement in percentage points
    comparison  Gaussian NBcoded against the MLP baseline, with memory growth
    """
    settings = settings or ExperimentSettings()
    rows: list[dict[str, object]] = []
    results: dict[str, CVResult] = {}

    if name == "baselines":
        for family in settings.families:
            row, cv = _evaluate("nb", family, dataset, settings)
            rows.append(row)
            results[model_label("nb", family)] = cv
    elif name == "nbcoded":
        for family in settings.families:
            base_row, base_cv = _evaluate("nb", family, dataset, settings)
            row, cv = _evaluate("nbcoded", family, dataset, settings)
            row["f1_improvement_points"] = (cv.mean("f1") - base_cv.mean("f1")) * 100.0
            rows.extend((base_row, row))
            results[model_label("nb", family)] = base_cv
            results[model_label("nbcoded", family)] = cv
    elif name == "comparison":
        for kind in ("nbcoded", "mlp"):
            row, cv = _evaluate(kind, "gaussian", dataset, settings, monitor_memory=True)
            rows.append(row)
            results[model_label(kind, "gaussian")] = cv
    else:
        raise ConfigError(f"unknown experiment {name!r}; expected one of {list(EXPERIMENTS)}")
    return ExperimentReport(name=name, rows=tuple(rows), results=results)
