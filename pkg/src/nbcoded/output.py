"""CLI output formatting: JSON, human-readable tables and NDJSON lines."""
from __future__ import annotations

import json
from collections.abc import Mapping, Sequence

import click


def output(data: Mapping[str, object], human: bool = False) -> None:
    """Print result as JSON (default) or human-readable text."""
    if human:
        for k, v in data.items():
            if isinstance(v, list) and v and all(isinstance(r, Mapping) for r in v):
                click.echo(f"{k}:")
                click.echo(format_table(v))  # type: ignore[arg-type]
            elif isinstance(v, (list, dict)):
                click.echo(f"{k}: {json.dumps(v, indent=2, default=str)}")
            else:
                click.echo(f"{k}: {_fmt(v)}")
    else:
        click.echo(json.dumps(data, indent=2, default=str))


def ndjson_line(row: Mapping[str, object]) -> str:
    """One deterministic JSON line: sorted keys, no whitespace padding."""
    return json.dumps(row, sort_keys=True, separators=(",", ":"), default=str)


def format_table(rows: Sequence[Mapping[str, object]], columns: Sequence[str] | None = None) -> str:
    """Render rows as an aligned plain-text table."""
    if not rows:
        return "(no rows)"
    cols = list(columns) if columns else list(rows[0].keys())
    cells = [[_fmt(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(v.rjust(w) if _numeric(v) else v.ljust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)


def _fmt(v: object) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _numeric(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
