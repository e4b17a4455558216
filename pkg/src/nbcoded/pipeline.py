"""The encoder + Naive Bayes model and its two baselines.

Training an NBcoded model:

1. filter services, select features, fit the min-max normalizer on all rows
2. split the rows into two stratified halves (A, B)
3. train the autoencoder on half A, inputs as targets
4. keep its encoder, encode half B
5. (complement) shift the encodings so every value is >= 0
6. fit the Naive Bayes family on the encoded half B
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Protocol, Union

import numpy as np

from nbcoded.data.flows import Dataset, class_counts
from nbcoded.data.split import derive_seeds, stratified_indices
from nbcoded.defaults import (
    AUTOENCODER_SIZES,
    BERNOULLI_THRESHOLD,
    DEFAULT_SEED,
    FEATURES,
    GAUSSIAN_VAR_SMOOTHING,
    MLP_HIDDEN,
    NB_ALPHA,
    NB_FAMILIES,
    SERVICES,
)
from nbcoded.errors import ConfigError, FeatureError, FitError, NbcodedError
from nbcoded.naive_bayes import NBModel, fit_nb
from nbcoded.naive_bayes import predict as nb_predict
from nbcoded.neuralnet import (
    Encoder,
    LayerSpec,
    Network,
    TrainConfig,
    encode,
    extract_encoder,
    init_network,
    predict_mlp,
    train,
    train_mlp,
)
from nbcoded.preprocess import FeatureMatrix, Normalizer, filter_services, fit_normalizer, select_features

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything train_nbcoded / train_bare_nb / train_mlp_baseline read.

    services=None skips the service filter. train.seed is replaced by a
    seed derived from `seed`.
    """

    features: tuple[str, ...] = FEATURES
    services: frozenset[str] | None = SERVICES
    autoencoder_sizes: tuple[int, ...] = AUTOENCODER_SIZES
    mlp_hidden: tuple[int, ...] = MLP_HIDDEN
    train: TrainConfig = field(default_factory=TrainConfig)
    alpha: float = NB_ALPHA
    bernoulli_threshold: float = BERNOULLI_THRESHOLD
    var_smoothing: float = GAUSSIAN_VAR_SMOOTHING
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "autoencoder_sizes", tuple(self.autoencoder_sizes))
        object.__setattr__(self, "mlp_hidden", tuple(self.mlp_hidden))
        if self.services is not None:
            object.__setattr__(self, "services", frozenset(self.services))
        if not self.features:
            raise ConfigError("at least one feature is required")
        if self.autoencoder_sizes[0] != len(self.features) or self.autoencoder_sizes[-1] != len(self.features):
            raise ConfigError(
                f"autoencoder sizes {list(self.autoencoder_sizes)} must start and end with "
                f"the feature count {len(self.features)}"
            )

    def nb_params(self, family: str) -> dict[str, float]:
        if family == "gaussian":
            return {"var_smoothing": self.var_smoothing}
        if family == "bernoulli":
            return {"alpha": self.alpha, "threshold": self.bernoulli_threshold}
        if family == "complement":
            return {"alpha": self.alpha}
        raise ConfigError(f"unknown Naive Bayes family {family!r}; expected one of {list(NB_FAMILIES)}")


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


class Classifier(Protocol):
    """Anything the evaluation harness can score."""

    @property
    def feature_names(self) -> tuple[str, ...]: ...

    def predict_batch(self, X: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class Provenance:
    """row_ids of the records each stage was fitted on."""

    autoencoder_rows: np.ndarray
    nb_rows: np.ndarray


@dataclass(frozen=True, eq=False)
class NBcodedModel:
    normalizer: Normalizer
    encoder: Encoder
    nb: NBModel
    cnb_offsets: np.ndarray | None = None
    seed: int = DEFAULT_SEED
    timings: dict[str, float] = field(default_factory=dict)
    provenance: Provenance | None = None

    def __post_init__(self) -> None:
        if self.encoder.input_width != len(self.normalizer.column_names):
            raise FeatureError(
                f"encoder input width {self.encoder.input_width} != "
                f"{len(self.normalizer.column_names)} normalized columns"
            )
        if self.nb.n_features != self.encoder.bottleneck:
            raise FeatureError(f"NB expects {self.nb.n_features} features, encoder yields {self.encoder.bottleneck}")
        if self.nb.family == "complement":
            if self.cnb_offsets is None or np.shape(self.cnb_offsets) != (self.encoder.bottleneck,):
                raise FeatureError("a complement NBcoded model needs one offset per encoded feature")
        elif self.cnb_offsets is not None:
            raise FeatureError("translation offsets only apply to complement models")

    @property
    def nb_family(self) -> str:
        return self.nb.family

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.normalizer.column_names

    def encoded(self, X: np.ndarray) -> np.ndarray:
        """Normalized, encoded and, for complement, translated features."""
        Z = encode(self.encoder, self.normalizer.transform(X))
        if self.cnb_offsets is not None:
            # values below the training minimum clamp to 0
            Z = np.maximum(Z + self.cnb_offsets, 0.0)
        return Z

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(nb_predict(self.nb, self.encoded(X)), dtype=np.int8)


@dataclass(frozen=True, eq=False)
class BareNBModel:
    """Naive Bayes directly on normalized features."""

    normalizer: Normalizer
    nb: NBModel
    seed: int = DEFAULT_SEED
    timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.nb.n_features != len(self.normalizer.column_names):
            raise FeatureError(f"NB expects {self.nb.n_features} features, normalizer has {len(self.normalizer.column_names)}")

    @property
    def nb_family(self) -> str:
        return self.nb.family

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.normalizer.column_names

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(nb_predict(self.nb, self.normalizer.transform(X)), dtype=np.int8)


@dataclass(frozen=True, eq=False)
class MLPModel:
    normalizer: Normalizer
    network: Network
    seed: int = DEFAULT_SEED
    timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.network.input_width != len(self.normalizer.column_names) or self.network.output_width != 1:
            raise FeatureError(f"MLP spec {list(self.network.spec.sizes)} does not fit the normalizer")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.normalizer.column_names

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return predict_mlp(self.network, self.normalizer.transform(X))


TrainedModel = Union[NBcodedModel, BareNBModel, MLPModel]


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@contextmanager
def _stage(name: str, timings: dict[str, float] | None = None) -> Iterator[None]:
    """Tag errors with the stage name; optionally record the stage's seconds."""
    start = time.perf_counter()
    try:
        yield
    except NbcodedError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    if timings is not None:
        timings[name] = time.perf_counter() - start


def preprocess(dataset: Dataset, config: PipelineConfig | None = None) -> FeatureMatrix:
    """Service filter + feature selection, labels and row ids carried along."""
    config = config or PipelineConfig()
    if config.services is not None:
        dataset = filter_services(dataset, config.services)
    return select_features(dataset, config.features)


def _require_both_classes(matrix: FeatureMatrix, what: str) -> None:
    assert matrix.labels is not None
    normal = int(np.count_nonzero(matrix.labels == 0))
    attack = matrix.n_rows - normal
    if normal == 0 or attack == 0:
        raise FitError(f"{what} needs both classes, got {normal} normal / {attack} attack rows")


def train_nbcoded(
    train_set: Dataset,
    family: str = "gaussian",
    config: PipelineConfig | None = None,
) -> NBcodedModel:
    config = config or PipelineConfig()
    params = config.nb_params(family)
    split_seed, net_seed = derive_seeds(config.seed, 2)
    timings: dict[str, float] = {}

    with _stage("preprocess", timings):
        matrix = preprocess(train_set, config)
        _require_both_classes(matrix, "NBcoded training")
        normalizer = fit_normalizer(matrix)
        X = normalizer.transform(matrix.values)
        assert matrix.labels is not None and matrix.row_ids is not None
        half_a, half_b = stratified_indices(matrix.labels, 0.5, split_seed)

    with _stage("autoencoder", timings):
        spec = LayerSpec(config.autoencoder_sizes, "tanh")
        ae_config = replace(config.train, seed=net_seed, loss="mae")
        result = train(init_network(spec, net_seed), X[half_a], X[half_a], ae_config)
        encoder = extract_encoder(result.network)

    with _stage("encode", timings):
        Z = encode(encoder, X[half_b])
        offsets = None
        if family == "complement":
            offsets = -Z.min(axis=0)
            Z = np.maximum(Z + offsets, 0.0)

    with _stage("nb", timings):
        nb = fit_nb(family, Z, matrix.labels[half_b], **params)

    timings["total"] = timings["autoencoder"] + timings["encode"] + timings["nb"]
    normal, attack = class_counts(train_set)
    log.info(
        "NBcoded/%s trained on %d rows (AE half %d, NB half %d) in %.2fs; input had %d normal / %d attack",
        family, matrix.n_rows, len(half_a), len(half_b), timings["total"], normal, attack,
    )
    return NBcodedModel(
        normalizer=normalizer,
        encoder=encoder,
        nb=nb,
        cnb_offsets=offsets,
        seed=config.seed,
        timings=timings,
        provenance=Provenance(
            autoencoder_rows=matrix.row_ids[half_a],
            nb_rows=matrix.row_ids[half_b],
        ),
    )


def train_bare_nb(
    train_set: Dataset,
    family: str = "gaussian",
    config: PipelineConfig | None = None,
) -> BareNBModel:
    """NB on every normalized training row; normalized values are already >= 0."""
    config = config or PipelineConfig()
    params = config.nb_params(family)
    timings: dict[str, float] = {}
    with _stage("preprocess", timings):
        matrix = preprocess(train_set, config)
        _require_both_classes(matrix, "NB training")
        normalizer = fit_normalizer(matrix)
        X = normalizer.transform(matrix.values)
    with _stage("nb", timings):
        nb = fit_nb(family, X, matrix.labels, **params)
    timings["total"] = timings["nb"]
    log.info("NB/%s trained on %d rows in %.3fs", family, matrix.n_rows, timings["total"])
    return BareNBModel(normalizer=normalizer, nb=nb, seed=config.seed, timings=timings)


def train_mlp_baseline(train_set: Dataset, config: PipelineConfig | None = None) -> MLPModel:
    """Normalizer + [n, 100, 100, 1] perceptron with the same stopping rule as the autoencoder."""
    config = config or PipelineConfig()
    (net_seed,) = derive_seeds(config.seed, 1)
    timings: dict[str, float] = {}
    with _stage("preprocess", timings):
        matrix = preprocess(train_set, config)
        _require_both_classes(matrix, "MLP training")
        normalizer = fit_normalizer(matrix)
        X = normalizer.transform(matrix.values)
    with _stage("mlp", timings):
        result = train_mlp(X, matrix.labels, replace(config.train, seed=net_seed), config.mlp_hidden)
    timings["total"] = timings["mlp"]
    log.info("MLP trained on %d rows in %.2fs (%d epochs)", matrix.n_rows, timings["total"], result.epochs_run)
    return MLPModel(normalizer=normalizer, network=result.network, seed=config.seed, timings=timings)


def train_model(
    kind: str, train_set: Dataset, family: str = "gaussian", config: PipelineConfig | None = None
) -> TrainedModel:
    """Dispatch on kind: nbcoded, nb or mlp."""
    if kind == "nbcoded":
        return train_nbcoded(train_set, family, config)
    if kind == "nb":
        return train_bare_nb(train_set, family, config)
    if kind == "mlp":
        return train_mlp_baseline(train_set, config)
    raise ConfigError(f"unknown model kind {kind!r}; expected nbcoded, nb or mlp")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def _as_matrix(model: Classifier, matrix: np.ndarray | FeatureMatrix) -> np.ndarray:
    if isinstance(matrix, FeatureMatrix):
        if matrix.column_names != model.feature_names:
            raise FeatureError(
                f"model expects columns {list(model.feature_names)}, got {list(matrix.column_names)}"
            )
        matrix = matrix.values
    X = np.asarray(matrix, dtype=np.float64)
    width = len(model.feature_names)
    if X.ndim != 2 or X.shape[1] != width:
        raise FeatureError(f"expected rows of {width} features, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise FeatureError("feature values must be finite")
    return X


def classify_batch(model: Classifier, matrix: np.ndarray | FeatureMatrix) -> np.ndarray:
    """Labels for each row of raw (un-normalized) selected features."""
    X = _as_matrix(model, matrix)
    if X.shape[0] == 0:
        return np.empty(0, dtype=np.int8)
    return np.asarray(model.predict_batch(X), dtype=np.int8)


def classify(model: Classifier, flow_features: np.ndarray) -> int:
    """Label of one flow: 0 normal, 1 attack."""
    x = np.asarray(flow_features, dtype=np.float64)
    width = len(model.feature_names)
    if x.shape != (width,):
        raise FeatureError(f"expected {width} feature values, got shape {x.shape}")
    return int(classify_batch(model, x[None, :])[0])


def features_for(model: Classifier, dataset: Dataset) -> np.ndarray:
    """The model's input columns out of a dataset."""
    return select_features(dataset, model.feature_names).values
