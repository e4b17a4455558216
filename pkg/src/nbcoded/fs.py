"""Filesystem helpers: atomic writes for model files and NDJSON reports."""

from __future__ import annotations

import os
import tempfile
from collections.abc import Iterable, Iterator, Mapping
from contextlib import contextmanager
from pathlib import Path
from typing import IO

from nbcoded.output import ndjson_line


@contextmanager
def atomic_open(path: str | Path, mode: str = "w") -> Iterator[IO]:  # type: ignore[type-arg]
    """Open a temp file next to path; rename it over path on clean exit."""
    path = str(path)
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_bytes(path: str | Path, content: bytes) -> str:
    """Write bytes to path atomically (write-to-temp, then rename).

    Returns the final path.
    """
    with atomic_open(path, "wb") as f:
        f.write(content)
    return str(path)


def atomic_write_file(path: str | Path, content: str) -> str:
    with atomic_open(path, "w") as f:
        f.write(content)
    return str(path)


def write_ndjson(path: str | Path, rows: Iterable[Mapping[str, object]]) -> int:
    """Stream rows to path as NDJSON, atomically. Returns the row count."""
    n = 0
    with atomic_open(path, "w") as f:
        for row in rows:
            f.write(ndjson_line(row))
            f.write("\n")
            n += 1
    return n
