"""Shared constants: env var names, model and evaluation settings, resolvers.

Single source of truth for every default the CLI, RunConfig and the
training code fall back to.
"""

from __future__ import annotations

import os
from pathlib import Path

# ---------------------------------------------------------------------------
# Env var names
# ---------------------------------------------------------------------------

ENV_SEED = "NBCODED_SEED"
ENV_UNSW_DIR = "NBCODED_UNSW_DIR"

# ---------------------------------------------------------------------------
# Data selection
# ---------------------------------------------------------------------------

# Selected flow features, in matrix column order.
FEATURES: tuple[str, ...] = (
    "sload",
    "dload",
    "dmeansz",
    "smeansz",
    "stcpb",
    "dtcpb",
    "sttl",
    "djit",
    "trans_depth",
)

SERVICES: frozenset[str] = frozenset({"unknown", "ftp", "dns"})

# Raw captures write the unknown service as "-"
UNKNOWN_SERVICE = "unknown"
RAW_UNKNOWN_SERVICE_TOKENS: frozenset[str] = frozenset({"-", ""})

NB_FAMILIES: tuple[str, ...] = ("gaussian", "complement", "bernoulli")

# ---------------------------------------------------------------------------
# Network shapes and training
# ---------------------------------------------------------------------------

AUTOENCODER_SIZES: tuple[int, ...] = (9, 8, 6, 8, 9)
MLP_HIDDEN: tuple[int, ...] = (100, 100)

EPOCHS = 100
BATCH_SIZE = 250
PATIENCE = 5
L2_FACTOR = 0.001
VALIDATION_FRACTION = 0.1

ADAM_LR = 0.001
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# ---------------------------------------------------------------------------
# Naive Bayes smoothing
# ---------------------------------------------------------------------------

NB_ALPHA = 1.0
BERNOULLI_THRESHOLD = 0.0
GAUSSIAN_VAR_SMOOTHING = 1e-9
GAUSSIAN_VAR_FLOOR = 1e-12

# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

K_SPLITS = 10
TRAIN_FRACTION = 0.8
DEFAULT_SEED = 0
CONVENTIONS: tuple[str, ...] = ("paper", "standard")

MODEL_SUFFIX = ".nbc"

# ---------------------------------------------------------------------------
# Resolvers
# ---------------------------------------------------------------------------


def resolve_seed(explicit: int | None = None) -> int:
    """Resolve the top-level seed: explicit > NBCODED_SEED > default."""
    if explicit is not None:
        return explicit
    raw = os.getenv(ENV_SEED)
    if raw:
        try:
            return int(raw)
        except ValueError:
            from nbcoded.errors import ConfigError
            raise ConfigError(f"{ENV_SEED} must be an integer, got {raw!r}") from None
    return DEFAULT_SEED


def resolve_unsw_dir() -> Path | None:
    """Directory holding the UNSW-NB15 capture CSVs, if configured."""
    raw = os.getenv(ENV_UNSW_DIR)
    return Path(raw).expanduser() if raw else None


def resolve_path(raw_value: str, base: Path) -> Path:
    """Resolve a possibly-relative path against a base directory."""
    path = Path(raw_value).expanduser()
    if not path.is_absolute():
        path = (base / path).resolve()
    return path
