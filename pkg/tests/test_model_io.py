"""Tests for the .nbc binary model format."""

from __future__ import annotations

import logging
import struct
import zlib
from pathlib import Path

import numpy as np
import pytest

from nbcoded.data import synthetic_flows
from nbcoded.errors import (
    BadMagicError,
    ChecksumError,
    ModelFormatError,
    TruncatedModelError,
    UnknownModelKindError,
    UnsupportedVersionError,
)
from nbcoded.model_io import (
    MAGIC,
    EmptyModel,
    deserialize,
    load_model,
    save_model,
    section_sizes,
    serialize,
)
from nbcoded.naive_bayes import GaussianNB
from nbcoded.neuralnet import TrainConfig
from nbcoded.pipeline import BareNBModel, PipelineConfig, classify_batch, train_model

HEADER_BYTES = 4 + 2 + 1 + 4
CRC_BYTES = 4

KINDS = [
    ("nbcoded", "gaussian", b"g"),
    ("nbcoded", "bernoulli", b"b"),
    ("nbcoded", "complement", b"c"),
    ("nb", "gaussian", b"G"),
    ("nb", "bernoulli", b"B"),
    ("nb", "complement", b"C"),
    ("mlp", "gaussian", b"M"),
]


@pytest.fixture(scope="module")
def trained():
    ds = synthetic_flows(800, seed=12)
    cfg = PipelineConfig(services=None, mlp_hidden=(10, 10), train=TrainConfig(epochs=3, batch_size=64, patience=2))
    return {(kind, family): train_model(kind, ds, family, cfg) for kind, family, _ in KINDS}


@pytest.fixture(scope="module")
def sample_rows() -> np.ndarray:
    return synthetic_flows(1000, seed=99).features


@pytest.mark.parametrize("kind,family,code", KINDS)
def test_roundtrip(trained, sample_rows, kind, family, code):
    model = trained[kind, family]
    blob = serialize(model)
    assert blob[:4] == MAGIC
    assert blob[6:7] == code
    restored = deserialize(blob)
    assert type(restored) is type(model)
    assert serialize(restored) == blob
    np.testing.assert_array_equal(classify_batch(restored, sample_rows), classify_batch(model, sample_rows))
    assert restored.feature_names == model.feature_names
    assert restored.seed == model.seed


@pytest.mark.parametrize("kind,family,code", KINDS)
def test_serialize_twice(trained, kind, family, code):
    model = trained[kind, family]
    assert serialize(model) == serialize(model)


@pytest.mark.parametrize("kind,family,code", KINDS)
def test_section_sizes_sum(trained, kind, family, code):
    model = trained[kind, family]
    sizes = section_sizes(model)
    assert sizes["header"] == HEADER_BYTES + CRC_BYTES
    assert sum(sizes.values()) == len(serialize(model))


def test_nbcoded_sections(trained):
    sizes = section_sizes(trained["nbcoded", "complement"])
    assert list(sizes) == ["header", "meta", "normalizer", "encoder", "nb", "offsets"]
    assert sizes["offsets"] == 6 * 8
    assert "offsets" not in section_sizes(trained["nbcoded", "gaussian"])


def test_gaussian_nb_float_count(trained):
    # 2 classes x 6 features x (mean, variance) + 2 log priors, then 2 u64 counts
    nb_bytes = section_sizes(trained["nbcoded", "gaussian"])["nb"]
    assert nb_bytes == 2 + 26 * 8 + 2 * 8


def test_empty_model():
    blob = serialize(EmptyModel())
    assert len(blob) == HEADER_BYTES + CRC_BYTES
    assert blob == serialize(EmptyModel())
    assert isinstance(deserialize(blob), EmptyModel)


def test_gaussian_nbcoded_footprint():
    cfg = PipelineConfig(services=None, train=TrainConfig(epochs=1, batch_size=1000, patience=1))
    small = train_model("nbcoded", synthetic_flows(1_000, seed=1), "gaussian", cfg)
    large = train_model("nbcoded", synthetic_flows(100_000, seed=1), "gaussian", cfg)
    assert len(serialize(small)) == len(serialize(large))
    assert len(serialize(small)) <= 16 * 1024


def test_non_finite_parameter():
    model = train_model("nb", synthetic_flows(200, seed=2), "gaussian", PipelineConfig(services=None))
    nb = model.nb
    broken = GaussianNB(mean=np.full_like(nb.mean, np.inf), variance=nb.variance, prior=nb.prior)
    with pytest.raises(ModelFormatError, match="non-finite"):
        serialize(BareNBModel(normalizer=model.normalizer, nb=broken))


# ---------------------------------------------------------------------------
# Corrupt files
# ---------------------------------------------------------------------------


class TestCorruption:
    @pytest.fixture
    def blob(self, trained) -> bytes:
        return serialize(trained["nbcoded", "gaussian"])

    def test_bad_magic(self, blob):
        with pytest.raises(BadMagicError):
            deserialize(b"XXXX" + blob[4:])

    def test_unsupported_version(self, blob):
        with pytest.raises(UnsupportedVersionError, match="2"):
            deserialize(blob[:4] + struct.pack("<H", 2) + blob[6:])

    def test_unknown_kind(self, blob):
        with pytest.raises(UnknownModelKindError):
            deserialize(blob[:6] + b"Z" + blob[7:])

    def test_flipped_payload_byte(self, blob):
        corrupt = bytearray(blob)
        corrupt[HEADER_BYTES + 20] ^= 0xFF
        with pytest.raises(ChecksumError):
            deserialize(bytes(corrupt))

    @pytest.mark.parametrize("keep", [2, 9, -1, -10])
    def test_truncated(self, blob, keep):
        with pytest.raises(TruncatedModelError):
            deserialize(blob[:keep])

    def test_trailing_bytes(self, blob):
        with pytest.raises(ModelFormatError, match="trailing"):
            deserialize(blob + b"\x00")

    def test_declared_dimensions_beyond_payload(self):
        payload = struct.pack("<q", 0) + struct.pack("<H", 500)
        header = struct.pack("<4sHcI", MAGIC, 1, b"G", len(payload))
        blob = header + payload + struct.pack("<I", zlib.crc32(payload))
        with pytest.raises(ModelFormatError, match="declared dimensions"):
            deserialize(blob)

    def test_zero_layer_width(self, trained):
        model = trained["mlp", "gaussian"]
        sizes = section_sizes(model)
        payload = bytearray(serialize(model)[HEADER_BYTES:-CRC_BYTES])
        first_width = sizes["meta"] + sizes["normalizer"] + 1
        payload[first_width : first_width + 2] = struct.pack("<H", 0)
        header = struct.pack("<4sHcI", MAGIC, 1, b"M", len(payload))
        blob = header + bytes(payload) + struct.pack("<I", zlib.crc32(payload))
        with pytest.raises(ModelFormatError, match="bad network layout"):
            deserialize(blob)

    def test_errors_share_a_base(self):
        for cls in (BadMagicError, UnsupportedVersionError, ChecksumError, TruncatedModelError, UnknownModelKindError):
            assert issubclass(cls, ModelFormatError)


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


class TestFiles:
    def test_save_and_load(self, trained, tmp_path: Path):
        model = trained["nbcoded", "complement"]
        path = tmp_path / "models" / "ids.nbc"
        n = save_model(model, path)
        assert n == path.stat().st_size
        assert serialize(load_model(path)) == serialize(model)
        assert not list(path.parent.glob("*.tmp"))

    def test_suffix_warning(self, trained, tmp_path: Path, caplog):
        with caplog.at_level(logging.WARNING, logger="nbcoded.model_io"):
            save_model(trained["nb", "gaussian"], tmp_path / "model.bin")
        assert "does not end in .nbc" in caplog.text
