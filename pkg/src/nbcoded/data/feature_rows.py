"""Unlabelled prediction input: bare feature rows or full flow records."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from nbcoded.errors import FlowParseError

from .flows import float_cells, parse_flow_csv
from .schema import FlowSchema, load_schema

log = logging.getLogger(__name__)


def read_feature_rows(
    path: str | Path,
    feature_names: Sequence[str],
    schema: FlowSchema | None = None,
) -> np.ndarray:
    """Matrix of the named features, one row per input line.

    Lines with exactly len(feature_names) comma-separated numbers are read
    as-is, in feature order. Lines as wide as the schema are parsed as flow
    records and the named columns selected.
    """
    schema = schema or load_schema()
    names = tuple(feature_names)
    path = Path(path)
    lines = path.read_text(encoding="latin-1").splitlines()
    if not any(line.strip() for line in lines):
        return np.empty((0, len(names)))
    raw = pd.Series(lines, dtype=object)
    line_no = np.arange(1, len(raw) + 1)
    keep = (raw.str.strip() != "").to_numpy()
    raw, line_no = raw[keep].reset_index(drop=True), line_no[keep]

    width = int(raw.iat[0].count(",")) + 1
    if width == schema.width and width != len(names):
        dataset = parse_flow_csv(path, schema, strict=True, source_id=path.name)
        missing = [n for n in names if n not in dataset.feature_names]
        if missing:
            raise FlowParseError(f"flow records lack model feature(s) {missing}")
        return dataset.features[:, [dataset.feature_names.index(n) for n in names]]
    if width != len(names):
        raise FlowParseError(
            f"expected {len(names)} feature columns or {schema.width}-column flow records, found {width}",
            line=int(line_no[0]),
        )

    n_fields = raw.str.count(",").to_numpy() + 1
    bad = np.flatnonzero(n_fields != width)
    if len(bad):
        pos = int(bad[0])
        raise FlowParseError(f"expected {width} columns, found {int(n_fields[pos])}", line=int(line_no[pos]))
    cells = raw.str.split(",", expand=True)
    values = np.column_stack([float_cells(cells[c].str.strip()) for c in cells.columns])
    bad_cells = ~np.isfinite(values)
    if bad_cells.any():
        pos = int(np.flatnonzero(bad_cells.any(axis=1))[0])
        j = int(np.argmax(bad_cells[pos]))
        raise FlowParseError(
            f"unparseable numeric value {str(cells.iat[pos, j]).strip()!r}", line=int(line_no[pos]), column=names[j]
        )
    log.info("read %d feature rows from %s", len(values), path)
    return values
