"""Tests for confusion counts and the four headline metrics."""

from __future__ import annotations

import numpy as np
import pytest

from nbcoded.errors import ConfigError, DataError
from nbcoded.eval import ConfusionMatrix, confusion, metrics


class TestConfusion:
    def test_perfect(self):
        assert confusion(np.array([1, 0, 1, 0]), np.array([1, 0, 1, 0])) == ConfusionMatrix(tp=2, fp=0, tn=2, fn=0)

    def test_false_positives(self):
        cm = confusion(np.array([1, 1]), np.array([0, 0]))
        assert cm.fp == 2
        assert cm.total == 2

    def test_loop_oracle(self, rng):
        preds = rng.integers(0, 2, 1000)
        labels = rng.integers(0, 2, 1000)
        tp = fp = tn = fn = 0
        for p, t in zip(preds, labels):
            if p and t:
                tp += 1
            elif p:
                fp += 1
            elif t:
                fn += 1
            else:
                tn += 1
        assert confusion(preds, labels) == ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            confusion(np.array([1, 0]), np.array([1]))

    def test_non_binary(self):
        with pytest.raises(DataError):
            confusion(np.array([1, 2]), np.array([1, 0]))

    def test_negative_counts(self):
        with pytest.raises(DataError):
            ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)


class TestMetrics:
    @pytest.mark.parametrize("convention", ["paper", "standard"])
    def test_symmetric_counts(self, convention):
        report = metrics(ConfusionMatrix(tp=4, fp=1, tn=4, fn=1), convention)
        assert report.precision == pytest.approx(0.8)
        assert report.recall == pytest.approx(0.8)
        assert report.accuracy == pytest.approx(0.8)
        assert report.f1 == pytest.approx(0.8)
        assert report.undefined == ()

    def test_degenerate(self, caplog):
        report = metrics(ConfusionMatrix(tp=0, fp=0, tn=10, fn=0))
        assert report.accuracy == 1.0
        assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)
        assert set(report.undefined) == {"precision", "recall", "f1"}
        assert "undefined metric" in caplog.text

    def test_paper_convention(self):
        report = metrics(ConfusionMatrix(tp=90, fp=10, tn=870, fn=30), "paper")
        assert report.precision == pytest.approx(0.75)
        assert report.recall == pytest.approx(0.9)
        assert report.f1 == pytest.approx(2 * 0.75 * 0.9 / 1.65)
        assert report.f1 == pytest.approx(0.818, abs=1e-3)
        assert report.accuracy == pytest.approx(0.96)

    def test_standard_swaps(self):
        cm = ConfusionMatrix(tp=90, fp=10, tn=870, fn=30)
        paper, standard = metrics(cm, "paper"), metrics(cm, "standard")
        assert standard.precision == paper.recall
        assert standard.recall == paper.precision
        assert standard.f1 == pytest.approx(paper.f1)
        assert standard.accuracy == paper.accuracy

    def test_formula_oracle(self, rng):
        for _ in range(1000):
            tp, fp, tn, fn = (int(v) for v in rng.integers(1, 10_000, 4))
            report = metrics(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
            p = tp / (tp + fn)
            r = tp / (tp + fp)
            assert abs(report.precision - p) <= 1e-15
            assert abs(report.recall - r) <= 1e-15
            assert abs(report.accuracy - (tp + tn) / (tp + fp + tn + fn)) <= 1e-15
            assert abs(report.f1 - 2 * p * r / (p + r)) <= 1e-15

    def test_unknown_convention(self):
        with pytest.raises(ConfigError):
            metrics(ConfusionMatrix(1, 1, 1, 1), "sklearn")

    def test_to_dict(self):
        d = metrics(ConfusionMatrix(tp=4, fp=1, tn=4, fn=1)).to_dict()
        assert set(d) == {"precision", "recall", "accuracy", "f1", "convention", "undefined"}
        assert d["convention"] == "paper"
