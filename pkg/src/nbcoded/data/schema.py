"""Schema descriptor loading and validation for headerless flow CSVs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import yaml

from nbcoded.errors import SchemaError

ColumnType = Literal["numeric", "token", "label"]

VALID_TYPES: frozenset[str] = frozenset({"numeric", "token", "label"})
VALID_TOP_KEYS = {"name", "columns", "service_column", "attack_column"}
REQUIRED_TOP_KEYS = {"columns"}

BUNDLED_SCHEMA = Path(__file__).resolve().parent / "unsw_nb15_schema.yaml"


@dataclass(frozen=True)
class Column:
    index: int
    name: str
    type: ColumnType


@dataclass(frozen=True)
class FlowSchema:
    name: str
    columns: tuple[Column, ...]
    service_column: str | None = "service"
    attack_column: str | None = "attack_cat"

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.type == "numeric")

    @property
    def label_column(self) -> Column:
        return next(c for c in self.columns if c.type == "label")


def load_schema(path: str | Path | None = None) -> FlowSchema:
    """Load a schema descriptor; None loads the bundled UNSW-NB15 layout."""
    schema_path = Path(path).expanduser() if path else BUNDLED_SCHEMA
    if not schema_path.exists():
        raise SchemaError(f"Schema descriptor not found: {schema_path}")
    try:
        raw = yaml.safe_load(schema_path.read_text())
    except yaml.YAMLError as exc:
        raise SchemaError(f"Corrupt schema descriptor {schema_path}: {exc}") from exc
    return parse_schema(raw, str(schema_path))


def parse_schema(raw: object, source: str = "<schema>") -> FlowSchema:
    """Validate a raw descriptor mapping; any structural error fails hard."""
    if not isinstance(raw, dict):
        raise SchemaError(f"Schema '{source}' must be a YAML mapping")
    missing = REQUIRED_TOP_KEYS - set(raw.keys())
    if missing:
        raise SchemaError(f"Schema '{source}' missing required keys: {sorted(missing)}")
    unknown = set(raw.keys()) - VALID_TOP_KEYS
    if unknown:
        raise SchemaError(f"Schema '{source}' has unknown top-level keys: {sorted(unknown)}")

    cols_raw = raw["columns"]
    if not isinstance(cols_raw, dict) or not cols_raw:
        raise SchemaError(f"Schema '{source}': 'columns' must be a non-empty mapping")

    columns: list[Column] = []
    for key, spec in cols_raw.items():
        _pfx = f"Schema '{source}', column {key!r}"
        try:
            index = int(key)
        except (TypeError, ValueError):
            raise SchemaError(f"{_pfx}: index must be an integer") from None
        if not isinstance(spec, dict) or "name" not in spec or "type" not in spec:
            raise SchemaError(f"{_pfx}: expected a mapping with 'name' and 'type'")
        ctype = str(spec["type"]).strip().lower()
        if ctype not in VALID_TYPES:
            raise SchemaError(f"{_pfx}: type {ctype!r} not in {sorted(VALID_TYPES)}")
        columns.append(Column(index=index, name=str(spec["name"]).strip(), type=ctype))  # type: ignore[arg-type]

    columns.sort(key=lambda c: c.index)
    if [c.index for c in columns] != list(range(len(columns))):
        raise SchemaError(f"Schema '{source}': column indices must be contiguous from 0")
    names = [c.name for c in columns]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise SchemaError(f"Schema '{source}': duplicate column names {dupes}")
    n_labels = sum(1 for c in columns if c.type == "label")
    if n_labels != 1:
        raise SchemaError(f"Schema '{source}': expected exactly one label column, found {n_labels}")

    service = raw.get("service_column", "service" if "service" in names else None)
    attack = raw.get("attack_column", "attack_cat" if "attack_cat" in names else None)
    for role, col in (("service_column", service), ("attack_column", attack)):
        if col is not None and col not in names:
            raise SchemaError(f"Schema '{source}': {role} {col!r} is not a column")

    return FlowSchema(
        name=str(raw.get("name", Path(source).stem)),
        columns=tuple(columns),
        service_column=service,
        attack_column=attack,
    )
