"""Click CLI entrypoint: `nbcoded <command>`.

JSON on stdout by default, --human for tables; logs go to stderr.
Exit codes: 0 success, 1 usage/config error, 2 data error, 3 training error.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable
from typing import TYPE_CHECKING, Any

import click

from nbcoded.errors import NbcodedError
from nbcoded.output import output as _output

if TYPE_CHECKING:
    from nbcoded.config import RunConfig
    from nbcoded.data import Dataset

log = logging.getLogger(__name__)


class _ExitCodeGroup(click.Group):
    """Maps library exceptions to exit codes with a one-line diagnostic."""

    def main(self, args: Any = None, prog_name: str | None = None, complete_var: str | None = None,
             standalone_mode: bool = True, **extra: Any) -> Any:
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            sys.exit(1)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        except NbcodedError as exc:
            click.echo(f"error: {_diagnostic(exc)}", err=True)
            sys.exit(exc.exit_code)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else 0)


def _diagnostic(exc: NbcodedError) -> str:
    msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
    if exc.stage and not msg.startswith(f"[{exc.stage}]"):
        msg = f"[{exc.stage}] {msg}"
    return msg


@click.group(cls=_ExitCodeGroup, epilog="Run 'nbcoded <command> --help' for command options.")
@click.version_option(package_name="nbcoded")
@click.option("--human", is_flag=True, help="Human-readable output instead of JSON")
@click.option("--verbose", "-v", count=True, help="-v for INFO logs, -vv for DEBUG")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="YAML run config; flags override its values")
@click.pass_context
def cli(ctx: click.Context, human: bool, verbose: int, config_path: str | None) -> None:
    """nbcoded: autoencoder + Naive Bayes intrusion detection toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["human"] = human
    ctx.obj["config_path"] = config_path
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


# =========================================================================
# Shared options
# =========================================================================

def _data_options(f: Callable[..., Any]) -> Callable[..., Any]:
    f = click.option("--lenient", is_flag=True, default=None, help="Drop malformed rows instead of failing")(f)
    f = click.option("--schema", default=None, type=click.Path(exists=True, dir_okay=False),
                     help="YAML column descriptor (default: bundled UNSW-NB15)")(f)
    f = click.option("--data", "-d", multiple=True, type=click.Path(exists=True, dir_okay=False),
                     help="Flow CSV file; repeat for several captures")(f)
    return f


def _model_options(f: Callable[..., Any]) -> Callable[..., Any]:
    f = click.option("--l2", type=float, default=None, help="L2 factor (default 0.001)")(f)
    f = click.option("--patience", type=int, default=None, help="Early-stopping patience (default 5)")(f)
    f = click.option("--batch-size", type=int, default=None, help="Mini-batch size (default 250)")(f)
    f = click.option("--epochs", type=int, default=None, help="Maximum epochs (default 100)")(f)
    f = click.option("--seed", type=int, default=None, help="Top-level seed (fallback: NBCODED_SEED)")(f)
    f = click.option("--family", type=click.Choice(["gaussian", "complement", "bernoulli"]), default=None)(f)
    return f


def _eval_options(f: Callable[..., Any]) -> Callable[..., Any]:
    f = click.option("--with-timings", is_flag=True, help="Include wall-clock columns in NDJSON rows")(f)
    f = click.option("--ndjson-out", default=None, type=click.Path(dir_okay=False), help="Write per-fold rows here")(f)
    f = click.option("--jobs", type=int, default=None, help="Folds run in parallel (default 1)")(f)
    f = click.option("--convention", type=click.Choice(["paper", "standard"]), default=None)(f)
    f = click.option("--train-fraction", type=float, default=None, help="Train share per split (default 0.8)")(f)
    f = click.option("--k", "k", type=int, default=None, help="Number of stratified splits (default 10)")(f)
    return f


def _run_config(ctx: click.Context, **flags: Any) -> RunConfig:
    from nbcoded.config import resolve_run_config

    lenient = flags.pop("lenient", None)
    if lenient:
        flags["strict"] = False
    data = flags.pop("data", ())
    if data:
        flags["data"] = tuple(data)
    return resolve_run_config(ctx.obj["config_path"], **flags)


def _load_dataset(cfg: RunConfig, synthetic: int | None = None) -> Dataset:
    from nbcoded.data import load_schema, read_flow_files, synthetic_flows
    from nbcoded.errors import ConfigError

    if synthetic:
        return synthetic_flows(synthetic, seed=cfg.resolved_seed)
    if not cfg.data:
        raise ConfigError("no input data: pass --data FILE (or set `data` in --config)")
    return read_flow_files(cfg.data, load_schema(cfg.schema), strict=cfg.strict)


def _filtered(cfg: RunConfig, dataset: Dataset) -> Dataset:
    from nbcoded.preprocess import filter_services

    return filter_services(dataset, cfg.services) if cfg.services else dataset


# =========================================================================
# Commands
# =========================================================================

@cli.command()
@click.option("--data", "-d", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="Flow CSV file; repeat for several captures")
@click.option("--schema", default=None, type=click.Path(exists=True, dir_okay=False),
              help="YAML column descriptor (default: bundled UNSW-NB15)")
@click.option("--strict", is_flag=True, help="Fail on the first malformed row instead of skipping it")
@click.option("--ndjson-out", default=None, type=click.Path(dir_okay=False), help="Dump parsed records as NDJSON")
@click.option("--show-errors", default=5, type=int, help="Malformed rows to list")
@click.pass_context
def ingest(ctx: click.Context, data: tuple[str, ...], schema: str | None, strict: bool,
           ndjson_out: str | None, show_errors: int) -> None:
    """Parse flow CSVs and summarize them; malformed rows are skipped and counted."""
    from collections import Counter

    from nbcoded.data import class_counts, dump_ndjson

    cfg = _run_config(ctx, data=data, schema=schema, lenient=not strict)
    dataset = _load_dataset(cfg)
    normal, attack = class_counts(dataset)
    selected = _filtered(cfg, dataset)
    sel_normal, sel_attack = class_counts(selected)
    errors = list(dataset.errors)
    result: dict[str, object] = {
        "source": dataset.source_id,
        "rows": len(dataset),
        "normal": normal,
        "attack": attack,
        "services": dict(sorted(Counter(dataset.services.tolist()).items())),
        "selected_services": list(cfg.services),
        "selected_rows": len(selected),
        "selected_normal": sel_normal,
        "selected_attack": sel_attack,
        "rejected_rows": len(errors),
    }
    if errors:
        result["first_errors"] = [e.to_dict() for e in errors[:show_errors]]
    if ndjson_out:
        result["ndjson_rows"] = dump_ndjson(dataset, ndjson_out)
        result["ndjson_out"] = ndjson_out
    _output(result, ctx.obj["human"])


@cli.command()
@_data_options
@_model_options
@click.option("--model", "model_kind", type=click.Choice(["nbcoded", "nb", "mlp"]), default=None,
              help="What to train (default nbcoded)")
@click.option("--model-out", "-o", default=None, type=click.Path(dir_okay=False), help="Output .nbc path")
@click.pass_context
def train(ctx: click.Context, model_kind: str | None, model_out: str | None, **flags: Any) -> None:
    """Train a model on flow CSVs and save it as .nbc."""
    from nbcoded.errors import ConfigError
    from nbcoded.eval import disk_breakdown
    from nbcoded.model_io import save_model
    from nbcoded.pipeline import train_model

    cfg = _run_config(ctx, model=model_kind, model_out=model_out, **flags)
    if not cfg.model_out:
        raise ConfigError("--model-out is required")
    dataset = _load_dataset(cfg)
    model = train_model(cfg.model, dataset, cfg.family, cfg.pipeline_config())
    n_bytes = save_model(model, cfg.model_out)
    result: dict[str, object] = {
        "model_out": cfg.model_out,
        "model": cfg.model,
        "seed": cfg.resolved_seed,
        "bytes": n_bytes,
        "kilobytes": n_bytes / 1024.0,
        "sections": disk_breakdown(model),
        "timings": model.timings,
        "rows": len(dataset),
    }
    if cfg.model != "mlp":
        result["family"] = cfg.family
    _output(result, ctx.obj["human"])


@cli.command()
@_data_options
@_model_options
@_eval_options
@click.option("--model", "model_kind", type=click.Choice(["nbcoded", "nb", "mlp"]), default=None,
              help="What to evaluate (default nbcoded)")
@click.pass_context
def evaluate(ctx: click.Context, model_kind: str | None, with_timings: bool, **flags: Any) -> None:
    """Stratified repeated-split evaluation with the four metrics."""
    from nbcoded.eval import builder_for, cross_validate, model_label
    from nbcoded.fs import write_ndjson

    cfg = _run_config(ctx, model=model_kind, **flags)
    dataset = _filtered(cfg, _load_dataset(cfg))
    builder = builder_for(cfg.model, cfg.family, cfg.pipeline_config())
    cv = cross_validate(dataset, builder, cfg.k, cfg.train_fraction, cfg.resolved_seed, cfg.convention, cfg.jobs)
    if cfg.ndjson_out:
        write_ndjson(cfg.ndjson_out, cv.rows(with_timings))
    summary = {"model": model_label(cfg.model, cfg.family), "seed": cfg.resolved_seed, **cv.summary()}
    _output({**summary, "folds": [f.to_row(with_timings) for f in cv.folds]}, ctx.obj["human"])


@cli.command()
@click.option("--model-in", "-m", default=None, type=click.Path(exists=True, dir_okay=False), help=".nbc model")
@click.option("--schema", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Column descriptor for full flow CSV input")
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Write labels here instead of stdout")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def predict(ctx: click.Context, model_in: str | None, schema: str | None, out: str | None, input_csv: str) -> None:
    """Label each row of INPUT_CSV (9 feature columns, or full flow records)."""
    import numpy as np

    from nbcoded.data import load_schema, read_feature_rows
    from nbcoded.errors import ConfigError, DataError
    from nbcoded.fs import atomic_write_file
    from nbcoded.model_io import EmptyModel, load_model
    from nbcoded.pipeline import classify_batch

    cfg = _run_config(ctx, model_in=model_in, schema=schema)
    if not cfg.model_in:
        raise ConfigError("--model-in is required")
    model = load_model(cfg.model_in)
    if isinstance(model, EmptyModel):
        raise DataError(f"{cfg.model_in} is an empty placeholder model")
    X = read_feature_rows(input_csv, model.feature_names, load_schema(cfg.schema))
    labels = classify_batch(model, X)
    text = "".join(f"{int(v)}\n" for v in labels)
    if out:
        atomic_write_file(out, text)
        _output({
            "out": out,
            "rows": int(labels.size),
            "attack": int(np.count_nonzero(labels == 1)),
            "normal": int(np.count_nonzero(labels == 0)),
        }, ctx.obj["human"])
    else:
        click.echo(text, nl=False)


@cli.command()
@_data_options
@_model_options
@_eval_options
@click.option("--synthetic", type=int, default=None, help="Use N generated flows instead of --data")
@click.pass_context
def benchmark(ctx: click.Context, synthetic: int | None, with_timings: bool, **flags: Any) -> None:
    """Gaussian NBcoded vs the MLP baseline: metrics, seconds, kB, memory."""
    _run_named_experiment(ctx, "comparison", synthetic, with_timings, flags)


@cli.command()
@click.argument("name", type=click.Choice(["baselines", "nbcoded", "comparison"]))
@_data_options
@_model_options
@_eval_options
@click.option("--synthetic", type=int, default=None, help="Use N generated flows instead of --data")
@click.pass_context
def experiment(ctx: click.Context, name: str, synthetic: int | None, with_timings: bool, **flags: Any) -> None:
    """Run an evaluation campaign: baselines, nbcoded or comparison."""
    _run_named_experiment(ctx, name, synthetic, with_timings, flags)


def _run_named_experiment(
    ctx: click.Context, name: str, synthetic: int | None, with_timings: bool, flags: dict[str, Any]
) -> None:
    from dataclasses import replace

    from nbcoded.eval import run_experiment
    from nbcoded.fs import write_ndjson

    family = flags.pop("family", None)
    cfg = _run_config(ctx, **flags)
    dataset = _filtered(cfg, _load_dataset(cfg, synthetic))
    settings = cfg.experiment_settings()
    if family:
        settings = replace(settings, families=(family,))
    report = run_experiment(name, dataset, settings)
    if cfg.ndjson_out:
        write_ndjson(cfg.ndjson_out, report.fold_rows(with_timings))
    result = report.to_dict()
    result["rows"] = len(dataset)
    result["seed"] = cfg.resolved_seed
    _output(result, ctx.obj["human"])


def main() -> None:
    cli(prog_name="nbcoded")
