"""Scoring of pipeline runs against labeled manifests.

Metrics are computed on exact rationals and *truncated* (not rounded) to
two decimals for display; percentage reductions truncate the remaining
share to one decimal. Undefined ratios (zero denominators) surface as an
explicit undefined state, never as zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .corpus import DatasetManifest
from .errors import PkgSentryError
from .llmclient import percent_reduction
from .workflow import LoadedRun


class EvalError(PkgSentryError):
    """Unlabeled packages, mismatched runs, or malformed inputs."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise EvalError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def _truncate_2dp(value: Fraction | None) -> str:
    if value is None:
        return "undefined"
    hundredths = (value.numerator * 100) // value.denominator
    return f"{hundredths // 100}.{hundredths % 100:02d}"


@dataclass(frozen=True)
class MetricsRow:
    precision: Fraction | None
    recall: Fraction | None
    f1: Fraction | None

    @property
    def precision_display(self) -> str:
        return _truncate_2dp(self.precision)

    @property
    def recall_display(self) -> str:
        return _truncate_2dp(self.recall)

    @property
    def f1_display(self) -> str:
        return _truncate_2dp(self.f1)

    def display(self) -> dict[str, str]:
        return {
            "precision": self.precision_display,
            "recall": self.recall_display,
            "f1": self.f1_display,
        }


def metrics(cm: ConfusionMatrix) -> MetricsRow:
    """Precision, recall, and F1 on untruncated rationals.

    F1 = 2PR/(P+R), which reduces to 2tp/(2tp+fp+fn); each ratio is
    undefined (not zero) when its denominator vanishes.
    """
    precision = Fraction(cm.tp, cm.tp + cm.fp) if cm.tp + cm.fp else None
    recall = Fraction(cm.tp, cm.tp + cm.fn) if cm.tp + cm.fn else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = Fraction(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn)
    return MetricsRow(precision=precision, recall=recall, f1=f1)


def confusion(run: LoadedRun, manifest: DatasetManifest) -> ConfusionMatrix:
    """Package-granularity confusion counts for a run against its manifest."""
    labels = {(e.name, e.version): e.label for e in manifest.entries}
    unlabeled = [
        f"{v['package']}@{v['version']}"
        for v in run.verdicts
        if (v["package"], v["version"]) not in labels
    ]
    if unlabeled:
        raise EvalError(f"packages missing from manifest: {', '.join(sorted(unlabeled))}")
    tp = tn = fp = fn = 0
    for verdict in run.verdicts:
        truth = labels[(verdict["package"], verdict["version"])]
        predicted = bool(verdict["is_malicious"])
        if truth == "malicious":
            if predicted:
                tp += 1
            else:
                fn += 1
        else:
            if predicted:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def dollars_to_nanodollars(value: str | Decimal) -> int:
    try:
        dec = Decimal(str(value))
    except InvalidOperation as exc:
        raise EvalError(f"bad dollar amount {value!r}") from exc
    nano = dec * 1_000_000_000
    if nano != nano.to_integral_value():
        raise EvalError(f"dollar amount {value!r} finer than nanodollars")
    return int(nano)


def reduction_report(
    files_before: int,
    files_after: int,
    costs: dict[str, tuple[int, int]] | None = None,
) -> dict:
    """Reduction summary from hand-entered or run-derived totals.

    ``costs`` maps a model id to (before, after) nanodollar totals. All
    percentages truncate the remaining share to one decimal place.
    """
    report = {
        "files": {
            "before": files_before,
            "after": files_after,
            "reduction_percent": percent_reduction(files_before, files_after),
        },
        "costs": {},
    }
    for model_id, (before_nano, after_nano) in sorted((costs or {}).items()):
        report["costs"][model_id] = {
            "before_dollars": str(Decimal(before_nano) / 1_000_000_000),
            "after_dollars": str(Decimal(after_nano) / 1_000_000_000),
            "reduction_percent": percent_reduction(before_nano, after_nano),
        }
    return report


def _run_package_set(run: LoadedRun) -> set[tuple[str, str]]:
    return {(v["package"], v["version"]) for v in run.verdicts}


def compare_runs(full_run: LoadedRun, prescreened_run: LoadedRun) -> dict:
    """Files-analyzed and per-model cost reductions between two runs."""
    if _run_package_set(full_run) != _run_package_set(prescreened_run):
        raise EvalError("runs cover different package sets; refusing to compare")
    files_before = full_run.counters.get("files_analyzed", 0)
    files_after = prescreened_run.counters.get("files_analyzed", 0)
    if files_before <= 0:
        raise EvalError("full run analyzed no files; nothing to compare")
    costs: dict[str, tuple[int, int]] = {}
    before_models = full_run.ledger.get("models", {})
    after_models = prescreened_run.ledger.get("models", {})
    for model_id in sorted(set(before_models) | set(after_models)):
        before_nano = before_models.get(model_id, {}).get("cost_nanodollars", 0)
        after_nano = after_models.get(model_id, {}).get("cost_nanodollars", 0)
        if before_nano > 0:
            costs[model_id] = (before_nano, after_nano)
    return reduction_report(files_before, files_after, costs)


def render_metrics_json(rows: dict[str, tuple[ConfusionMatrix, MetricsRow]]) -> str:
    payload = {
        name: {"confusion": cm.to_dict(), "metrics": row.display()}
        for name, (cm, row) in rows.items()
    }
    return json.dumps(payload, indent=2)


def render_metrics_markdown(rows: dict[str, tuple[ConfusionMatrix, MetricsRow]]) -> str:
    lines = [
        "| Run | TP | TN | FP | FN | Precision | Recall | F1 |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for name, (cm, row) in rows.items():
        lines.append(
            f"| {name} | {cm.tp} | {cm.tn} | {cm.fp} | {cm.fn} "
            f"| {row.precision_display} | {row.recall_display} | {row.f1_display} |"
        )
    return "\n".join(lines) + "\n"


def render_metrics_csv(rows: dict[str, tuple[ConfusionMatrix, MetricsRow]]) -> str:
    lines = ["run,tp,tn,fp,fn,precision,recall,f1"]
    for name, (cm, row) in rows.items():
        lines.append(
            f"{name},{cm.tp},{cm.tn},{cm.fp},{cm.fn},"
            f"{row.precision_display},{row.recall_display},{row.f1_display}"
        )
    return "\n".join(lines) + "\n"
