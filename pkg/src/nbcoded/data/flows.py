"""Flow records, datasets, and headerless UNSW-NB15 CSV ingestion.

A Dataset stores its records column-wise (one float64 matrix for the
numeric columns plus label/service/family vectors) so a full capture fits
in memory; FlowRecord views are built on demand.
"""

from __future__ import annotations

import io
import itertools
import logging
from collections.abc import Iterable, Iterator, Mapping, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Union

import numpy as np
import pandas as pd

from nbcoded.defaults import RAW_UNKNOWN_SERVICE_TOKENS, UNKNOWN_SERVICE
from nbcoded.errors import DataError, FlowParseError
from nbcoded.fs import write_ndjson

from .schema import FlowSchema, load_schema

log = logging.getLogger(__name__)

FlowSource = Union[bytes, str, Path, IO[bytes], IO[str]]

CHUNK_ROWS = 100_000


@dataclass(frozen=True)
class FlowRecord:
    features: Mapping[str, float]
    service: str
    label: int
    attack_family: str | None = None

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        bad = [k for k, v in self.features.items() if not np.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite feature values: {bad}")


@dataclass(frozen=True)
class RowError:
    line: int
    column: str | None
    message: str

    def to_exception(self) -> FlowParseError:
        return FlowParseError(self.message, line=self.line, column=self.column)

    def to_dict(self) -> dict[str, object]:
        return {"line": self.line, "column": self.column, "message": self.message}


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable, column-wise collection of flow records."""

    feature_names: tuple[str, ...]
    features: np.ndarray
    labels: np.ndarray
    services: np.ndarray
    attack_families: np.ndarray
    row_ids: np.ndarray
    source_id: str = ""
    errors: tuple[RowError, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.labels)
        features = np.asarray(self.features, dtype=np.float64).reshape(n, len(self.feature_names))
        labels = np.asarray(self.labels, dtype=np.int8)
        services = np.asarray(self.services, dtype=object)
        families = np.asarray(self.attack_families, dtype=object)
        row_ids = np.asarray(self.row_ids, dtype=np.int64)
        for name, arr in (("services", services), ("attack_families", families), ("row_ids", row_ids)):
            if arr.shape != (n,):
                raise DataError(f"Dataset {name} has shape {arr.shape}, expected ({n},)")
        if n and not np.isin(labels, (0, 1)).all():
            raise DataError("Dataset labels must be 0 or 1")
        if features.size and not np.isfinite(features).all():
            raise DataError("Dataset features must be finite")
        for name, arr in (("features", features), ("labels", labels), ("services", services),
                          ("attack_families", families), ("row_ids", row_ids)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_records(
        cls,
        records: Sequence[FlowRecord],
        source_id: str = "",
        feature_names: Sequence[str] | None = None,
    ) -> Dataset:
        names = tuple(feature_names) if feature_names is not None else (
            tuple(records[0].features.keys()) if records else ()
        )
        values = np.array([[r.features[n] for n in names] for r in records], dtype=np.float64)
        return cls(
            feature_names=names,
            features=values.reshape(len(records), len(names)),
            labels=np.array([r.label for r in records], dtype=np.int8),
            services=np.array([r.service for r in records], dtype=object),
            attack_families=np.array([r.attack_family for r in records], dtype=object),
            row_ids=np.arange(len(records), dtype=np.int64),
            source_id=source_id,
        )

    @classmethod
    def concat(cls, parts: Sequence[Dataset], source_id: str | None = None) -> Dataset:
        if not parts:
            raise DataError("nothing to concatenate")
        names = parts[0].feature_names
        for p in parts[1:]:
            if p.feature_names != names:
                raise DataError(f"cannot concatenate datasets with different columns: {p.source_id}")
        return cls(
            feature_names=names,
            features=np.concatenate([p.features for p in parts]),
            labels=np.concatenate([p.labels for p in parts]),
            services=np.concatenate([p.services for p in parts]),
            attack_families=np.concatenate([p.attack_families for p in parts]),
            row_ids=np.concatenate([p.row_ids for p in parts]),
            source_id=source_id if source_id is not None else "+".join(p.source_id for p in parts),
            errors=tuple(itertools.chain.from_iterable(p.errors for p in parts)),
        )

    def take(self, indices: np.ndarray | Sequence[int]) -> Dataset:
        """Sub-dataset with the given row positions, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            feature_names=self.feature_names,
            features=self.features[idx],
            labels=self.labels[idx],
            services=self.services[idx],
            attack_families=self.attack_families[idx],
            row_ids=self.row_ids[idx],
            source_id=self.source_id,
        )

    # -- access ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> FlowRecord:
        return FlowRecord(
            features=dict(zip(self.feature_names, self.features[i].tolist())),
            service=str(self.services[i]),
            label=int(self.labels[i]),
            attack_family=self.attack_families[i],
        )

    def __iter__(self) -> Iterator[FlowRecord]:
        return (self[i] for i in range(len(self)))

    @property
    def records(self) -> tuple[FlowRecord, ...]:
        return tuple(self)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.features[:, self.feature_names.index(name)]
        except ValueError:
            raise KeyError(name) from None


def class_counts(dataset: Dataset) -> tuple[int, int]:
    """(count_normal, count_attack)."""
    attack = int(np.count_nonzero(dataset.labels))
    return len(dataset) - attack, attack


# ---------------------------------------------------------------------------
# CSV parsing
# ---------------------------------------------------------------------------


def parse_flow_csv(
    source: FlowSource,
    schema: FlowSchema | None = None,
    *,
    strict: bool = True,
    source_id: str | None = None,
    row_offset: int = 0,
    chunk_rows: int = CHUNK_ROWS,
) -> Dataset:
    """Parse a headerless comma-separated flow capture.

    strict=True raises the first row-level error; strict=False drops bad
    rows and keeps them on ``Dataset.errors``. Cells are not quoted.
    """
    schema = schema or load_schema()
    if source_id is None:
        source_id = str(source) if isinstance(source, (str, Path)) else "<stream>"

    parts: list[Dataset] = []
    errors: list[RowError] = []
    accepted = row_offset
    with _open_text(source) as stream:
        first_line = 1
        while True:
            lines = list(itertools.islice(stream, chunk_rows))
            if not lines:
                break
            part, chunk_errors = _parse_chunk(lines, first_line, schema, accepted, source_id)
            if chunk_errors:
                if strict:
                    raise chunk_errors[0].to_exception()
                errors.extend(chunk_errors)
            if len(part):
                parts.append(part)
                accepted += len(part)
            first_line += len(lines)

    if not parts:
        if errors:
            raise FlowParseError(f"no valid rows in {source_id} ({len(errors)} rejected)")
        raise FlowParseError(f"empty input: {source_id} has no data rows")
    if errors:
        log.warning("%s: dropped %d malformed rows (first at line %d)", source_id, len(errors), errors[0].line)

    dataset = Dataset.concat(parts, source_id=source_id)
    if errors:
        dataset = replace(dataset, errors=tuple(errors))
    log.info("parsed %s: %d records", source_id, len(dataset))
    return dataset


def read_flow_files(
    paths: Sequence[str | Path],
    schema: FlowSchema | None = None,
    *,
    strict: bool = True,
) -> Dataset:
    """Parse several capture files and concatenate them in argument order."""
    if not paths:
        raise DataError("no input files given")
    schema = schema or load_schema()
    parts: list[Dataset] = []
    offset = 0
    for p in paths:
        path = Path(p).expanduser()
        if not path.exists():
            raise DataError(f"input file not found: {path}")
        part = parse_flow_csv(path, schema, strict=strict, source_id=path.name, row_offset=offset)
        parts.append(part)
        offset += len(part)
    return Dataset.concat(parts)


def dump_ndjson(dataset: Dataset, path: str | Path, limit: int | None = None) -> int:
    """Debug dump: one record per line (features, service, label, family)."""
    rows: Iterable[FlowRecord] = dataset if limit is None else itertools.islice(dataset, limit)
    return write_ndjson(path, (
        {"features": dict(r.features), "service": r.service, "label": r.label, "attack_family": r.attack_family}
        for r in rows
    ))


@contextmanager
def _open_text(source: FlowSource) -> Iterator[IO[str]]:
    """Yield a text line iterator for any FlowSource; caller streams stay open."""
    if isinstance(source, bytes):
        yield io.StringIO(source.decode("latin-1"))
    elif isinstance(source, (str, Path)):
        with open(source, encoding="latin-1", newline="") as f:
            yield f
    elif isinstance(source, io.TextIOBase):
        yield source  # type: ignore[misc]
    else:
        wrapper = io.TextIOWrapper(source, encoding="latin-1", newline="")  # type: ignore[arg-type]
        try:
            yield wrapper
        finally:
            wrapper.detach()


def _cell_float(cell: object) -> float:
    try:
        return float(cell)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        return np.nan


def float_cells(cells: pd.Series) -> np.ndarray:
    """float() of each cell, so repr() output parses back bit-exact; unparseable cells become NaN."""
    raw = cells.to_numpy(dtype=object)
    try:
        return raw.astype(np.float64)
    except (TypeError, ValueError):
        return np.array([_cell_float(c) for c in raw], dtype=np.float64)


def _parse_chunk(
    lines: list[str],
    first_line: int,
    schema: FlowSchema,
    row_offset: int,
    source_id: str,
) -> tuple[Dataset, list[RowError]]:
    raw = pd.Series(lines, dtype=object).str.rstrip("\r\n")
    line_no = np.arange(first_line, first_line + len(raw))
    keep = (raw.str.strip() != "").to_numpy()
    raw, line_no = raw[keep].reset_index(drop=True), line_no[keep]

    errors: dict[int, RowError] = {}
    n_fields = raw.str.count(",").to_numpy() + 1
    for pos in np.flatnonzero(n_fields != schema.width):
        ln = int(line_no[pos])
        errors[ln] = RowError(ln, None, f"expected {schema.width} columns, found {int(n_fields[pos])}")

    ok = n_fields == schema.width
    raw, line_no = raw[ok].reset_index(drop=True), line_no[ok]
    numeric_names = schema.numeric_names
    if len(raw) == 0:
        return _empty_dataset(numeric_names, source_id), sorted(errors.values(), key=lambda e: e.line)

    cells = raw.str.split(",", expand=True)
    cells.columns = list(schema.names)
    cells = cells.apply(lambda c: c.str.strip())

    label_name = schema.label_column.name
    label_text = cells[label_name]
    label_val = pd.to_numeric(label_text, errors="coerce").to_numpy(dtype=np.float64)
    bad_label = ~np.isin(label_val, (0.0, 1.0))
    for pos in np.flatnonzero(bad_label):
        ln = int(line_no[pos])
        cell = label_text.iat[pos]
        msg = "label column absent" if cell == "" else f"label must be 0 or 1, got {cell!r}"
        errors.setdefault(ln, RowError(ln, label_name, msg))

    values = np.empty((len(cells), len(numeric_names)), dtype=np.float64)
    for j, name in enumerate(numeric_names):
        values[:, j] = float_cells(cells[name])
    bad_cells = ~np.isfinite(values)
    for pos in np.flatnonzero(bad_cells.any(axis=1)):
        ln = int(line_no[pos])
        j = int(np.argmax(bad_cells[pos]))
        name = numeric_names[j]
        cell = cells[name].iat[pos]
        msg = "empty numeric cell" if cell == "" else f"unparseable numeric value {cell!r}"
        errors.setdefault(ln, RowError(ln, name, msg))

    good = ~(bad_label | bad_cells.any(axis=1))
    if schema.service_column:
        services = cells[schema.service_column].to_numpy(dtype=object)
        services = np.where(np.isin(services, list(RAW_UNKNOWN_SERVICE_TOKENS)), UNKNOWN_SERVICE, services)
    else:
        services = np.full(len(cells), UNKNOWN_SERVICE, dtype=object)
    if schema.attack_column:
        families = cells[schema.attack_column].to_numpy(dtype=object)
        families = np.where(families == "", None, families)
    else:
        families = np.full(len(cells), None, dtype=object)

    n_good = int(good.sum())
    part = Dataset(
        feature_names=numeric_names,
        features=values[good],
        labels=label_val[good].astype(np.int8),
        services=services[good],
        attack_families=families[good],
        row_ids=np.arange(row_offset, row_offset + n_good, dtype=np.int64),
        source_id=source_id,
    )
    return part, sorted(errors.values(), key=lambda e: e.line)


def _empty_dataset(names: tuple[str, ...], source_id: str) -> Dataset:
    return Dataset(
        feature_names=names,
        features=np.empty((0, len(names))),
        labels=np.empty(0, dtype=np.int8),
        services=np.empty(0, dtype=object),
        attack_families=np.empty(0, dtype=object),
        row_ids=np.empty(0, dtype=np.int64),
        source_id=source_id,
    )
