"""Tests for repeated stratified evaluation and the experiment campaigns."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from nbcoded.data import Dataset, derive_seeds
from nbcoded.defaults import FEATURES
from nbcoded.errors import ConfigError, FitError, NonFiniteLossError
from nbcoded.eval import (
    ExperimentSettings,
    bare_builder,
    builder_for,
    cross_validate,
    model_label,
    run_experiment,
)


class ConstantModel:
    feature_names = FEATURES

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return np.zeros(len(X), dtype=np.int8)


class LookupModel:
    """Knows the label of every row it was built from."""

    feature_names = FEATURES

    def __init__(self, dataset: Dataset) -> None:
        self.table = {row.tobytes(): int(label) for row, label in zip(dataset.features, dataset.labels)}

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.table[row.tobytes()] for row in X], dtype=np.int8)


class TestCrossValidate:
    def test_constant_predictor_has_zero_spread(self, flows):
        cv = cross_validate(flows, lambda train_set, seed: ConstantModel(), k=5, seed=3)
        assert cv.k == 5
        assert cv.std("accuracy") == 0.0
        assert cv.mean("f1") == 0.0
        assert cv.disk_kb is None

    def test_memorizer_is_perfect(self, flows):
        cv = cross_validate(flows, lambda train_set, seed: LookupModel(flows), k=2, seed=0)
        assert cv.values("accuracy").tolist() == [1.0, 1.0]

    def test_split_geometry(self, flows):
        cv = cross_validate(flows, lambda t, s: ConstantModel(), k=3, train_fraction=0.8, seed=4)
        for fold in cv.folds:
            assert fold.n_train == 960
            assert fold.n_test == 240
        assert [f.seed for f in cv.folds] == derive_seeds(4, 3)

    def test_builder_sees_fold_seed_and_train_rows(self, flows):
        seen = []

        def builder(train_set, seed):
            seen.append((seed, len(train_set)))
            return ConstantModel()

        cross_validate(flows, builder, k=3, seed=9)
        assert seen == [(s, 960) for s in derive_seeds(9, 3)]

    def test_deterministic(self, flows, fast_pipeline):
        builder = bare_builder("gaussian", fast_pipeline)
        a = cross_validate(flows, builder, k=4, seed=2)
        b = cross_validate(flows, builder, k=4, seed=2)
        assert list(a.rows()) == list(b.rows())

    def test_jobs_do_not_change_results(self, flows, fast_pipeline):
        builder = bare_builder("bernoulli", fast_pipeline)
        serial = cross_validate(flows, builder, k=4, seed=5, jobs=1)
        threaded = cross_validate(flows, builder, k=4, seed=5, jobs=3)
        assert list(serial.rows()) == list(threaded.rows())

    def test_population_std(self, flows, fast_pipeline):
        cv = cross_validate(flows, bare_builder("gaussian", fast_pipeline), k=4, seed=1)
        values = cv.values("f1")
        assert cv.std("f1") == pytest.approx(np.sqrt(np.mean((values - values.mean()) ** 2)))

    def test_rows_and_summary(self, flows, fast_pipeline):
        cv = cross_validate(flows, bare_builder("gaussian", fast_pipeline), k=2, seed=1, convention="standard")
        row = next(cv.rows())
        assert {"fold", "seed", "tp", "fp", "tn", "fn", "f1", "standard_f1", "disk_kb"} <= set(row)
        assert row["convention"] == "standard"
        assert "train_seconds" not in row
        assert "train_seconds" in cv.folds[0].to_row(with_timings=True)
        summary = cv.summary()
        for name in ("precision", "recall", "accuracy", "f1", "train_seconds"):
            assert f"{name}_mean" in summary and f"{name}_std" in summary
        assert summary["disk_kb"] > 0

    def test_fold_index_on_errors(self, flows):
        def failing(train_set, seed):
            raise FitError("no good")

        with pytest.raises(FitError) as exc:
            cross_validate(flows, failing, k=2)
        assert exc.value.stage == "fold 0"

    def test_training_error_names_fold(self, flows):
        def diverging(train_set, seed):
            raise NonFiniteLossError("loss became nan", stage="autoencoder")

        with pytest.raises(NonFiniteLossError) as exc:
            cross_validate(flows, diverging, k=2)
        assert exc.value.stage == "fold 0/autoencoder"
        assert str(exc.value) == "[fold 0/autoencoder] loss became nan"
        assert exc.value.exit_code == 3

    @pytest.mark.parametrize("kwargs", [{"k": 1}, {"jobs": 0}, {"convention": "weird"}])
    def test_bad_settings(self, flows, kwargs):
        with pytest.raises(ConfigError):
            cross_validate(flows, lambda t, s: ConstantModel(), **kwargs)


class TestExperiments:
    @pytest.fixture
    def settings(self, fast_pipeline) -> ExperimentSettings:
        return ExperimentSettings(k=2, seed=0, pipeline=replace(fast_pipeline, mlp_hidden=(8,)))

    def test_labels(self):
        assert model_label("nbcoded", "complement") == "nbcoded-complement"
        assert model_label("mlp", "gaussian") == "mlp"

    def test_unknown_builder(self):
        with pytest.raises(ConfigError):
            builder_for("forest")

    def test_unknown_experiment(self, flows, settings):
        with pytest.raises(ConfigError):
            run_experiment("ablation", flows, settings)

    def test_baselines(self, flows, settings):
        report = run_experiment("baselines", flows, settings)
        assert [r["model"] for r in report.rows] == ["nb-gaussian", "nb-complement", "nb-bernoulli"]
        assert len(report.fold_rows()) == 6

    def test_nbcoded_improvement(self, flows, settings):
        report = run_experiment("nbcoded", flows, replace(settings, families=("gaussian",)))
        base, coded = report.rows
        assert (base["model"], coded["model"]) == ("nb-gaussian", "nbcoded-gaussian")
        assert coded["f1_improvement_points"] == pytest.approx(100 * (coded["f1_mean"] - base["f1_mean"]))

    def test_comparison(self, flows, settings):
        report = run_experiment("comparison", flows, settings)
        assert [r["model"] for r in report.rows] == ["nbcoded-gaussian", "mlp"]
        for row in report.rows:
            assert row["peak_rss_growth_mb"] >= 0.0
            assert row["disk_kb"] > 0
        assert report.to_dict()["experiment"] == "comparison"
