"""Binary `.nbc` model files.

Layout (all integers and floats little-endian)::

    magic      4 bytes   b"NBCD"
    version    u16
    kind       1 byte    G B C (bare NB), g b c (NBcoded), M (MLP), E (empty)
    length     u32       payload byte count
    payload    sections, in a kind-specific order
    crc32      u32       zlib CRC-32 of the payload

Sections:

    meta        i64 seed
    normalizer  u16 n; n x (u16 len + utf-8 name); f64[n] mins; f64[n] maxs
    network     u8 n_sizes; u16[n_sizes]; u8 activation; u8 output activation;
                per layer: f64 weights (row-major, out x in), f64 biases
    nb          u16 n_features; family parameters; f64[2] log priors; u64[2] class counts
    offsets     f64[n_features] (complement NBcoded only)
"""

from __future__ import annotations

import logging
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nbcoded.defaults import MODEL_SUFFIX
from nbcoded.errors import (
    BadMagicError,
    ChecksumError,
    ModelFormatError,
    TruncatedModelError,
    UnknownModelKindError,
    UnsupportedVersionError,
)
from nbcoded.fs import atomic_write_bytes
from nbcoded.naive_bayes import BernoulliNB, ClassPrior, ComplementNB, GaussianNB, NBModel
from nbcoded.neuralnet import Encoder, LayerSpec, Network
from nbcoded.pipeline import BareNBModel, MLPModel, NBcodedModel
from nbcoded.preprocess import Normalizer

log = logging.getLogger(__name__)

MAGIC = b"NBCD"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHcI")
_CRC = struct.Struct("<I")

_FAMILY_CODES = {"gaussian": "g", "bernoulli": "b", "complement": "c"}
_CODE_FAMILIES = {v: k for k, v in _FAMILY_CODES.items()}
_ACTIVATION_CODES = {None: 0, "tanh": 1, "sigmoid": 2}
_CODE_ACTIVATIONS = {v: k for k, v in _ACTIVATION_CODES.items()}


@dataclass(frozen=True)
class EmptyModel:
    """Header-only placeholder; measures the fixed format overhead."""


Model = NBcodedModel | BareNBModel | MLPModel | EmptyModel


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


class _Writer:
    def __init__(self) -> None:
        self.buf = bytearray()

    def u8(self, v: int) -> None:
        self.buf += struct.pack("<B", v)

    def u16(self, v: int) -> None:
        self.buf += struct.pack("<H", v)

    def i64(self, v: int) -> None:
        self.buf += struct.pack("<q", v)

    def u64s(self, values: np.ndarray) -> None:
        self.buf += np.ascontiguousarray(values, dtype="<u8").tobytes()

    def f64(self, v: float) -> None:
        self.f64s(np.array([v]))

    def f64s(self, values: np.ndarray) -> None:
        arr = np.ascontiguousarray(values, dtype="<f8")
        if not np.isfinite(arr).all():
            raise ModelFormatError("cannot serialize a non-finite parameter")
        self.buf += arr.tobytes()

    def text(self, s: str) -> None:
        raw = s.encode("utf-8")
        self.u16(len(raw))
        self.buf += raw


def _write_meta(w: _Writer, seed: int) -> None:
    w.i64(seed)


def _write_normalizer(w: _Writer, norm: Normalizer) -> None:
    w.u16(len(norm.column_names))
    for name in norm.column_names:
        w.text(name)
    w.f64s(norm.mins)
    w.f64s(norm.maxs)


def _write_network(w: _Writer, net: Network) -> None:
    spec = net.spec
    w.u8(len(spec.sizes))
    for s in spec.sizes:
        w.u16(s)
    w.u8(_ACTIVATION_CODES[spec.activation])
    w.u8(_ACTIVATION_CODES[spec.output_activation])
    for weight, bias in zip(net.weights, net.biases):
        w.f64s(weight.ravel(order="C"))
        w.f64s(bias)


def _write_nb(w: _Writer, nb: NBModel) -> None:
    w.u16(nb.n_features)
    if isinstance(nb, GaussianNB):
        w.f64s(nb.mean.ravel())
        w.f64s(nb.variance.ravel())
    elif isinstance(nb, BernoulliNB):
        w.f64(nb.binarize_threshold)
        w.f64(nb.alpha)
        w.f64s(nb.log_p.ravel())
        w.f64s(nb.log_q.ravel())
    else:
        w.f64(nb.alpha)
        w.f64s(nb.weight.ravel())
    w.f64s(nb.prior.log_prior)
    w.u64s(nb.prior.class_count)


def _kind(model: Model) -> str:
    if isinstance(model, NBcodedModel):
        return _FAMILY_CODES[model.nb_family]
    if isinstance(model, BareNBModel):
        return _FAMILY_CODES[model.nb_family].upper()
    if isinstance(model, MLPModel):
        return "M"
    if isinstance(model, EmptyModel):
        return "E"
    raise UnknownModelKindError(f"cannot serialize {type(model).__name__}")


def _sections(model: Model) -> list[tuple[str, bytes]]:
    """Payload sections in file order."""
    out: list[tuple[str, bytes]] = []

    def section(name: str, fill) -> None:  # type: ignore[no-untyped-def]
        w = _Writer()
        fill(w)
        out.append((name, bytes(w.buf)))

    if isinstance(model, EmptyModel):
        return out
    section("meta", lambda w: _write_meta(w, model.seed))
    section("normalizer", lambda w: _write_normalizer(w, model.normalizer))
    if isinstance(model, NBcodedModel):
        section("encoder", lambda w: _write_network(w, model.encoder))
        section("nb", lambda w: _write_nb(w, model.nb))
        if model.cnb_offsets is not None:
            offsets = model.cnb_offsets
            section("offsets", lambda w: w.f64s(offsets))
    elif isinstance(model, BareNBModel):
        section("nb", lambda w: _write_nb(w, model.nb))
    else:
        section("network", lambda w: _write_network(w, model.network))
    return out


def serialize(model: Model) -> bytes:
    """Deterministic bytes: the same model always gives the same file."""
    kind = _kind(model)
    payload = b"".join(body for _, body in _sections(model))
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, kind.encode("ascii"), len(payload))
    return header + payload + _CRC.pack(zlib.crc32(payload) & 0xFFFFFFFF)


def section_sizes(model: Model) -> dict[str, int]:
    """Bytes per section; `header` includes the trailing checksum."""
    _kind(model)
    sizes = {"header": _HEADER.size + _CRC.size}
    for name, body in _sections(model):
        sizes[name] = len(body)
    return sizes


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


class _Reader:
    def __init__(self, payload: bytes) -> None:
        self.data = payload
        self.pos = 0

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(
                f"declared dimensions need {n} bytes at offset {self.pos}, payload has {len(self.data) - self.pos}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self._take(2))[0]

    def i64(self) -> int:
        return struct.unpack("<q", self._take(8))[0]

    def u64s(self, n: int) -> np.ndarray:
        return np.frombuffer(self._take(8 * n), dtype="<u8").astype(np.int64)

    def f64(self) -> float:
        return float(self.f64s(1)[0])

    def f64s(self, n: int) -> np.ndarray:
        return np.frombuffer(self._take(8 * n), dtype="<f8").astype(np.float64)

    def text(self) -> str:
        n = self.u16()
        return self._take(n).decode("utf-8")

    def done(self) -> None:
        if self.pos != len(self.data):
            raise ModelFormatError(f"{len(self.data) - self.pos} unread payload bytes")


def _read_normalizer(r: _Reader) -> Normalizer:
    n = r.u16()
    names = tuple(r.text() for _ in range(n))
    return Normalizer(column_names=names, mins=r.f64s(n), maxs=r.f64s(n))


def _read_network(r: _Reader, cls: type[Network] = Network) -> Network:
    sizes = tuple(r.u16() for _ in range(r.u8()))
    try:
        activation = _CODE_ACTIVATIONS[r.u8()]
        output_activation = _CODE_ACTIVATIONS[r.u8()]
    except KeyError as exc:
        raise ModelFormatError(f"unknown activation code {exc.args[0]}") from None
    if activation is None:
        raise ModelFormatError("network has no hidden activation")
    try:
        spec = LayerSpec(sizes, activation, output_activation)
    except ValueError as exc:
        raise ModelFormatError(f"bad network layout: {exc}") from exc
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(r.f64s(fan_in * fan_out).reshape(fan_out, fan_in))
        biases.append(r.f64s(fan_out))
    try:
        return cls(spec=spec, weights=tuple(weights), biases=tuple(biases))
    except ValueError as exc:
        raise ModelFormatError(f"bad network parameters: {exc}") from exc


def _read_nb(r: _Reader, family: str) -> NBModel:
    f = r.u16()
    if family == "gaussian":
        mean = r.f64s(2 * f).reshape(2, f)
        variance = r.f64s(2 * f).reshape(2, f)
        prior = ClassPrior(log_prior=r.f64s(2), class_count=r.u64s(2))
        return GaussianNB(mean=mean, variance=variance, prior=prior)
    if family == "bernoulli":
        threshold, alpha = r.f64(), r.f64()
        log_p = r.f64s(2 * f).reshape(2, f)
        log_q = r.f64s(2 * f).reshape(2, f)
        prior = ClassPrior(log_prior=r.f64s(2), class_count=r.u64s(2))
        return BernoulliNB(log_p=log_p, log_q=log_q, binarize_threshold=threshold, alpha=alpha, prior=prior)
    alpha = r.f64()
    weight = r.f64s(2 * f).reshape(2, f)
    prior = ClassPrior(log_prior=r.f64s(2), class_count=r.u64s(2))
    return ComplementNB(weight=weight, alpha=alpha, prior=prior)


def deserialize(data: bytes) -> Model:
    """Rebuild a model; predictions match the serialized model bit for bit."""
    data = bytes(data)
    if len(data) < len(MAGIC):
        raise TruncatedModelError(f"{len(data)} bytes is shorter than the file magic")
    if data[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"not an .nbc model file (magic {data[:len(MAGIC)]!r})")
    if len(data) < _HEADER.size:
        raise TruncatedModelError(f"header needs {_HEADER.size} bytes, file has {len(data)}")
    _, version, kind_byte, length = _HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"format version {version} is not supported (expected {FORMAT_VERSION})")
    kind = kind_byte.decode("ascii", errors="replace")
    if kind not in "GBCgbcME" or len(kind) != 1:
        raise UnknownModelKindError(f"unknown model kind {kind_byte!r}")
    end = _HEADER.size + length
    if len(data) < end + _CRC.size:
        raise TruncatedModelError(f"payload declares {length} bytes; file ends after {len(data) - _HEADER.size}")
    if len(data) > end + _CRC.size:
        raise ModelFormatError(f"{len(data) - end - _CRC.size} trailing bytes after the checksum")
    payload = data[_HEADER.size : end]
    (stored,) = _CRC.unpack_from(data, end)
    if zlib.crc32(payload) & 0xFFFFFFFF != stored:
        raise ChecksumError("payload checksum mismatch; the file is corrupt")

    r = _Reader(payload)
    if kind == "E":
        r.done()
        return EmptyModel()
    seed = r.i64()
    normalizer = _read_normalizer(r)
    model: Model
    if kind == "M":
        model = MLPModel(normalizer=normalizer, network=_read_network(r), seed=seed)
    elif kind.isupper():
        model = BareNBModel(normalizer=normalizer, nb=_read_nb(r, _CODE_FAMILIES[kind.lower()]), seed=seed)
    else:
        encoder = _read_network(r, Encoder)
        family = _CODE_FAMILIES[kind]
        nb = _read_nb(r, family)
        offsets = r.f64s(encoder.output_width) if family == "complement" else None
        model = NBcodedModel(normalizer=normalizer, encoder=encoder, nb=nb, cnb_offsets=offsets, seed=seed)  # type: ignore[arg-type]
    r.done()
    return model


def save_model(model: Model, path: str | Path) -> int:
    """Write atomically; returns the byte count."""
    path = Path(path)
    if path.suffix != MODEL_SUFFIX:
        log.warning("model path %s does not end in %s", path, MODEL_SUFFIX)
    blob = serialize(model)
    atomic_write_bytes(path, blob)
    log.info("wrote %s (%d bytes, kind %s)", path, len(blob), _kind(model))
    return len(blob)


def load_model(path: str | Path) -> Model:
    return deserialize(Path(path).read_bytes())
