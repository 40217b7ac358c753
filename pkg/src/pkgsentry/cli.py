"""Command-line entry point: scan, eval, and serve.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 run
completed with partial per-file failures.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import evalharness, figures
from .corpus import load_manifest
from .errors import ConfigurationError
from .evalharness import (
    ConfusionMatrix,
    compare_runs,
    confusion,
    dollars_to_nanodollars,
    metrics,
    reduction_report,
    render_metrics_csv,
    render_metrics_json,
    render_metrics_markdown,
)
from .llmclient import (
    Cassette,
    CostLedger,
    LiveBackend,
    LLMClient,
    MockBackend,
    RateLimiter,
    ReplayBackend,
)
from .prescreen import default_rules, load_rules
from .prompts import load_profile
from .workflow import load_run, run_pipeline, write_run_artifact

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


@click.group()
def cli():
    """Malicious-package review pipeline."""


@cli.command("scan")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["full", "prescreened"]), default="full")
@click.option("--backend", type=click.Choice(["live", "replay", "mock"]), default="mock")
@click.option("--cassette", "cassette_path", type=click.Path(dir_okay=False), default=None)
@click.option("--record", is_flag=True, help="record responses to --cassette")
@click.option("--profile", "profile_name", default="gpt3", help="shipped name or JSON path")
@click.option("--rules", "rules_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="pkgsentry-run")
@click.option("--parallelism", type=int, default=4)
@click.option("--seed", type=int, default=0)
@click.option("--policy", type=click.Choice(["truncate_tail", "skip"]), default="truncate_tail")
@click.option("--endpoint", default="https://api.openai.com", help="live backend base URL")
@click.option("--rate-limit", type=int, default=None, help="max live requests per minute")
def cmd_scan(
    manifest,
    mode,
    backend,
    cassette_path,
    record,
    profile_name,
    rules_path,
    out_dir,
    parallelism,
    seed,
    policy,
    endpoint,
    rate_limit,
):
    """Run the analysis pipeline over a dataset manifest."""
    if backend == "replay" and not cassette_path:
        raise click.UsageError("--backend replay requires --cassette")
    if record and backend == "replay":
        raise click.UsageError("--record cannot be combined with --backend replay")
    if record and not cassette_path:
        raise click.UsageError("--record requires --cassette")

    dataset = load_manifest(manifest)
    profile = load_profile(profile_name)
    rules = load_rules(rules_path) if rules_path else default_rules()

    if backend == "mock":
        engine = MockBackend(rules=rules)
    elif backend == "replay":
        engine = ReplayBackend(Cassette.load(cassette_path))
    else:
        engine = LiveBackend(endpoint=endpoint)

    recording = None
    if record:
        from datetime import datetime, timezone

        recording = Cassette(
            model_id=profile.model_id, created_at=datetime.now(timezone.utc).isoformat()
        )

    ledger = CostLedger()
    ledger.register_model(profile)
    limiter = RateLimiter(rate_limit) if rate_limit else None
    client = LLMClient(backend=engine, ledger=ledger, recording=recording, limiter=limiter)

    result = run_pipeline(
        dataset,
        mode=mode,
        profile=profile,
        client=client,
        rules=rules,
        budget_policy=policy,
        parallelism=parallelism,
        seed=seed,
        backend_name=backend,
    )
    out_path = write_run_artifact(result, out_dir)
    if recording is not None:
        recording.save(cassette_path)

    counters = result.counters
    click.echo(
        f"scanned {len(result.verdicts)} packages, {counters.files_total} files "
        f"({counters.files_analyzed} analyzed, {counters.files_skipped} skipped, "
        f"{counters.files_not_selected} not selected, {counters.files_failed} failed)"
    )
    malicious = sum(1 for v in result.verdicts if v.is_malicious)
    click.echo(f"verdicts: {malicious} malicious / {len(result.verdicts)} packages")
    click.echo(f"run artifact: {out_path}")
    if result.has_failures:
        click.echo("warning: some files failed; see verdicts.jsonl", err=True)
        return EXIT_PARTIAL
    return EXIT_OK


def _parse_matrix(spec: str) -> tuple[str, ConfusionMatrix]:
    name, _, cells = spec.rpartition("=")
    parts = cells.split(",")
    if len(parts) != 4:
        raise click.UsageError(f"--matrix expects tp,tn,fp,fn (got {spec!r})")
    try:
        tp, tn, fp, fn = (int(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"--matrix cells must be integers (got {spec!r})")
    return name or cells, ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def _parse_cost(spec: str) -> tuple[str, tuple[int, int]]:
    name, sep, amounts = spec.partition("=")
    before, sep2, after = amounts.partition(":")
    if not sep or not sep2:
        raise click.UsageError(f"--cost expects model=before:after dollars (got {spec!r})")
    return name, (dollars_to_nanodollars(before), dollars_to_nanodollars(after))


@cli.command("eval")
@click.argument("runs", nargs=-1, type=click.Path(exists=True, file_okay=False))
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--matrix", "matrices", multiple=True, help="hand-entered tp,tn,fp,fn")
@click.option("--compare", is_flag=True, help="emit reduction report for two runs")
@click.option("--files", "files_spec", default=None, help="hand-entered before,after file counts")
@click.option("--cost", "costs", multiple=True, help="hand-entered model=before:after dollars")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None)
def cmd_eval(runs, manifest_path, matrices, compare, files_spec, costs, out_dir):
    """Score runs against a manifest, or reproduce published arithmetic."""
    rows: dict[str, tuple[ConfusionMatrix, evalharness.MetricsRow]] = {}

    for spec in matrices:
        name, cm = _parse_matrix(spec)
        rows[name] = (cm, metrics(cm))

    loaded = []
    if runs:
        if not manifest_path and not compare:
            raise click.UsageError("scoring runs requires --manifest")
        loaded = [load_run(r) for r in runs]
        if manifest_path:
            dataset = load_manifest(manifest_path)
            for run_dir, run in zip(runs, loaded):
                cm = confusion(run, dataset)
                rows[Path(run_dir).name] = (cm, metrics(cm))

    reduction = None
    if compare:
        if len(loaded) != 2:
            raise click.UsageError("--compare requires exactly two run directories")
        reduction = compare_runs(loaded[0], loaded[1])
    elif files_spec:
        try:
            before, after = (int(x) for x in files_spec.split(","))
        except ValueError:
            raise click.UsageError("--files expects before,after integers")
        reduction = reduction_report(before, after, dict(_parse_cost(c) for c in costs))

    if not rows and reduction is None:
        raise click.UsageError("nothing to evaluate: pass runs, --matrix, or --files")

    for name, (cm, row) in rows.items():
        prefix = "" if name == f"{cm.tp},{cm.tn},{cm.fp},{cm.fn}" else f"{name}: "
        click.echo(
            f"{prefix}P={row.precision_display} R={row.recall_display} F1={row.f1_display}"
        )
    if reduction is not None:
        files = reduction["files"]
        click.echo(
            f"files analyzed: {files['before']} -> {files['after']} "
            f"({files['reduction_percent']}% reduction)"
        )
        for model_id, cost in reduction["costs"].items():
            click.echo(
                f"{model_id} cost: ${cost['before_dollars']} -> ${cost['after_dollars']} "
                f"({cost['reduction_percent']}% reduction)"
            )

    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if rows:
            (out / "metrics.json").write_text(render_metrics_json(rows), encoding="utf-8")
            (out / "metrics.md").write_text(render_metrics_markdown(rows), encoding="utf-8")
            (out / "metrics.csv").write_text(render_metrics_csv(rows), encoding="utf-8")
            figures.confusion_figure(rows, out / "confusion.png")
        if reduction is not None:
            import json as _json

            (out / "reduction.json").write_text(_json.dumps(reduction, indent=2), encoding="utf-8")
            figures.reduction_figure(reduction, out / "reduction.png")
        click.echo(f"eval report: {out}")
    return EXIT_OK


@cli.command("serve")
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--port", type=int, default=8787)
@click.option("--host", default="127.0.0.1")
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False), default=None)
def cmd_serve(run_dir, port, host, ui_dir):
    """Serve the triage API (and the built UI, if present) over a run."""
    import uvicorn

    from .server import create_app

    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if candidate.is_dir():
            ui_dir = str(candidate)
    app = create_app(run_dir, ui_dir=ui_dir)
    click.echo(f"serving triage API on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        result = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
