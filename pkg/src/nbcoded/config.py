"""Run configuration: defaults, optional YAML file, env seed, CLI flags.

Precedence, highest first: explicit flag > config file > NBCODED_SEED
(seed only) > nbcoded.defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import yaml

from nbcoded.defaults import (
    AUTOENCODER_SIZES,
    BATCH_SIZE,
    BERNOULLI_THRESHOLD,
    CONVENTIONS,
    EPOCHS,
    FEATURES,
    GAUSSIAN_VAR_SMOOTHING,
    K_SPLITS,
    L2_FACTOR,
    MLP_HIDDEN,
    NB_ALPHA,
    NB_FAMILIES,
    PATIENCE,
    SERVICES,
    TRAIN_FRACTION,
    VALIDATION_FRACTION,
    resolve_path,
    resolve_seed,
)
from nbcoded.errors import ConfigError
from nbcoded.eval import ExperimentSettings
from nbcoded.neuralnet import TrainConfig
from nbcoded.pipeline import PipelineConfig

MODEL_KINDS: tuple[str, ...] = ("nbcoded", "nb", "mlp")


@dataclass(frozen=True)
class RunConfig:
    data: tuple[str, ...] = ()
    schema: str | None = None
    strict: bool = True
    features: tuple[str, ...] = FEATURES
    services: tuple[str, ...] = tuple(sorted(SERVICES))
    family: str = "gaussian"
    model: str = "nbcoded"
    autoencoder_sizes: tuple[int, ...] = AUTOENCODER_SIZES
    mlp_hidden: tuple[int, ...] = MLP_HIDDEN
    epochs: int = EPOCHS
    batch_size: int = BATCH_SIZE
    patience: int = PATIENCE
    l2: float = L2_FACTOR
    validation_fraction: float = VALIDATION_FRACTION
    alpha: float = NB_ALPHA
    var_smoothing: float = GAUSSIAN_VAR_SMOOTHING
    bernoulli_threshold: float = BERNOULLI_THRESHOLD
    k: int = K_SPLITS
    train_fraction: float = TRAIN_FRACTION
    seed: int | None = None
    jobs: int = 1
    convention: str = "paper"
    model_out: str | None = None
    model_in: str | None = None
    ndjson_out: str | None = None

    def __post_init__(self) -> None:
        if self.family not in NB_FAMILIES:
            raise ConfigError(f"family must be one of {list(NB_FAMILIES)}, got {self.family!r}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model must be one of {list(MODEL_KINDS)}, got {self.model!r}")
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"convention must be one of {list(CONVENTIONS)}, got {self.convention!r}")
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if not self.features:
            raise ConfigError("features must not be empty")
        if self.seed is not None and self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")

    @property
    def resolved_seed(self) -> int:
        return resolve_seed(self.seed)

    def train_config(self) -> TrainConfig:
        try:
            return TrainConfig(
                epochs=self.epochs,
                batch_size=self.batch_size,
                patience=self.patience,
                l2_factor=self.l2,
                validation_fraction=self.validation_fraction,
                seed=self.resolved_seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def pipeline_config(self) -> PipelineConfig:
        return PipelineConfig(
            features=self.features,
            services=frozenset(self.services) if self.services else None,
            autoencoder_sizes=self.autoencoder_sizes,
            mlp_hidden=self.mlp_hidden,
            train=self.train_config(),
            alpha=self.alpha,
            bernoulli_threshold=self.bernoulli_threshold,
            var_smoothing=self.var_smoothing,
            seed=self.resolved_seed,
        )

    def experiment_settings(self) -> ExperimentSettings:
        return ExperimentSettings(
            k=self.k,
            train_fraction=self.train_fraction,
            seed=self.resolved_seed,
            convention=self.convention,
            jobs=self.jobs,
            pipeline=self.pipeline_config(),
        )

    def with_overrides(self, **values: Any) -> RunConfig:
        """Copy with every non-None value applied; keys use field names."""
        changes = {k: v for k, v in values.items() if v is not None and v != ()}
        return replace(self, **_coerce(changes, "flags")) if changes else self


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_TUPLE_FIELDS = {"data", "features", "services", "autoencoder_sizes", "mlp_hidden"}
_INT_FIELDS = {"epochs", "batch_size", "patience", "k", "jobs", "seed"}
_FLOAT_FIELDS = {"l2", "validation_fraction", "alpha", "var_smoothing", "bernoulli_threshold", "train_fraction"}
_PATH_FIELDS = {"schema", "model_out", "model_in", "ndjson_out"}


def _coerce(raw: dict[str, Any], source: str, base: Path | None = None) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name not in _FIELD_TYPES:
            raise ConfigError(f"{source}: unknown key {key!r}")
        try:
            if name in _TUPLE_FIELDS:
                items = [value] if isinstance(value, (str, int)) else list(value)
                if name in ("autoencoder_sizes", "mlp_hidden"):
                    out[name] = tuple(int(v) for v in items)
                elif name == "data" and base is not None:
                    out[name] = tuple(str(resolve_path(str(v), base)) for v in items)
                else:
                    out[name] = tuple(str(v) for v in items)
            elif name in _INT_FIELDS:
                if isinstance(value, bool) or int(value) != value:
                    raise ValueError(value)
                out[name] = int(value)
            elif name in _FLOAT_FIELDS:
                out[name] = float(value)
            elif name == "strict":
                if not isinstance(value, bool):
                    raise ValueError(value)
                out[name] = value
            elif name in _PATH_FIELDS and base is not None:
                out[name] = str(resolve_path(str(value), base))
            else:
                out[name] = str(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{source}: bad value for {key!r}: {value!r}") from None
    return out


def load_run_config(path: str | Path) -> dict[str, Any]:
    """Validated overrides from a YAML mapping; relative paths resolve against the file's directory."""
    cfg_path = Path(path).expanduser().resolve()
    if not cfg_path.exists():
        raise ConfigError(f"config not found: {cfg_path}")
    try:
        raw = yaml.safe_load(cfg_path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{cfg_path}: invalid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{cfg_path}: top-level config must be a YAML mapping")
    return _coerce(raw, str(cfg_path), base=cfg_path.parent)


def resolve_run_config(config_path: str | Path | None = None, **flags: Any) -> RunConfig:
    config = RunConfig()
    if config_path:
        config = replace(config, **load_run_config(config_path))
    config = config.with_overrides(**flags)
    # surfaces a bad NBCODED_SEED as a usage error before any work starts
    return replace(config, seed=config.resolved_seed)
