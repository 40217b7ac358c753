"""Per-file staged analysis and package-level verdict rollup.

Each selected file runs the three-stage chain: a batch of initial reports,
a critique pass over those reports, and a single consolidating final
report. Raw model text is forwarded between stages; parsed reports are
recorded alongside. File scores roll up to a package verdict using the
strictly-greater-than-0.5 malware threshold.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .corpus import DatasetManifest, PackageArtifact, SourceFile
from .errors import PkgSentryError
from .llmclient import ChatRequest, LLMClient
from .prescreen import PreScreenFinding, RuleSet, default_rules, scan_package
from .prompts import (
    ModelProfile,
    PromptBundle,
    SkipSignal,
    budget_fit,
    prompt_checksums,
    render_critique,
    render_final,
    render_initial,
)
from .reportjson import AnalysisReport, ReportParseError, parse_report

MALICIOUS_THRESHOLD = 0.5

MAX_FILE_ATTEMPTS = 2

MODES = ("full", "prescreened")


@dataclass(frozen=True)
class FileAnalysis:
    file_path: str
    stage1_reports: tuple[AnalysisReport | None, ...] = ()
    stage2_reports: tuple[AnalysisReport | None, ...] = ()
    final_report: AnalysisReport | None = None
    skipped: str | None = None
    failed: str | None = None
    attempts: int = 0

    def __post_init__(self):
        populated = sum(
            1 for x in (self.final_report, self.skipped, self.failed) if x is not None
        )
        if populated != 1:
            raise ValueError("exactly one of final_report/skipped/failed must be set")

    @property
    def outcome(self) -> str:
        if self.final_report is not None:
            return "analyzed"
        return "skipped" if self.skipped is not None else "failed"


@dataclass(frozen=True)
class PackageVerdict:
    package: str
    version: str
    label: str | None
    file_analyses: tuple[FileAnalysis, ...]
    max_malware_score: float
    max_security_risk: float
    is_malicious: bool
    triage_priority: float

    def sort_key(self) -> tuple:
        return (-self.triage_priority, -self.max_security_risk, self.package)


def _complete_stage(
    client: LLMClient, bundle: PromptBundle, model_id: str, stage_cfg
) -> tuple[str, ...]:
    req = ChatRequest(
        model_id=model_id,
        system_text=bundle.system_text,
        user_text=bundle.user_text,
        temperature=stage_cfg.temperature,
        top_p=stage_cfg.top_p,
        n=stage_cfg.n_reports,
    )
    return client.complete(req).texts


def _parse_each(texts: tuple[str, ...]) -> tuple[AnalysisReport | None, ...]:
    parsed: list[AnalysisReport | None] = []
    for text in texts:
        try:
            parsed.append(parse_report(text))
        except ReportParseError:
            parsed.append(None)
    return tuple(parsed)


def _final_is_degraded(report: AnalysisReport | None) -> bool:
    return report is None or report.has_violation("placeholder_text")


def analyze_file(
    file: SourceFile,
    profile: ModelProfile,
    client: LLMClient,
    budget_policy: str = "truncate_tail",
) -> FileAnalysis:
    """Run the full stage chain for one file.

    A final report that fails to parse or merely echoes the response
    template triggers one whole-file retry before the degraded result is
    surfaced. Transport and cassette failures mark the file failed, never
    silently benign.
    """
    stages = profile.stage_configs()

    bundle = render_initial(file)
    if isinstance(bundle, SkipSignal):
        return FileAnalysis(file_path=file.path, skipped=bundle.reason)
    bundle = budget_fit(bundle, profile, policy=budget_policy)
    if isinstance(bundle, SkipSignal):
        return FileAnalysis(file_path=file.path, skipped=bundle.reason)

    attempts = 0
    last: FileAnalysis | None = None
    while attempts < MAX_FILE_ATTEMPTS:
        attempts += 1
        try:
            stage1_texts = _complete_stage(client, bundle, profile.model_id, stages["initial"])

            critique_bundle = budget_fit(
                render_critique(file, list(stage1_texts)), profile, policy=budget_policy
            )
            if isinstance(critique_bundle, SkipSignal):
                return FileAnalysis(
                    file_path=file.path, skipped=critique_bundle.reason, attempts=attempts
                )
            stage2_texts = _complete_stage(
                client, critique_bundle, profile.model_id, stages["critique"]
            )

            final_bundle = budget_fit(
                render_final(file, list(stage2_texts)), profile, policy=budget_policy
            )
            if isinstance(final_bundle, SkipSignal):
                return FileAnalysis(
                    file_path=file.path, skipped=final_bundle.reason, attempts=attempts
                )
            final_texts = _complete_stage(client, final_bundle, profile.model_id, stages["final"])
        except PkgSentryError as exc:
            return FileAnalysis(
                file_path=file.path,
                failed=f"failed-retryable: {exc}",
                attempts=attempts,
            )

        stage1 = _parse_each(stage1_texts)
        stage2 = _parse_each(stage2_texts)
        final = _parse_each(final_texts)[0]

        if final is None:
            last = FileAnalysis(
                file_path=file.path,
                stage1_reports=stage1,
                stage2_reports=stage2,
                failed="degraded: final report unparseable",
                attempts=attempts,
            )
        else:
            last = FileAnalysis(
                file_path=file.path,
                stage1_reports=stage1,
                stage2_reports=stage2,
                final_report=final,
                attempts=attempts,
            )
        if not _final_is_degraded(final):
            return last
    return last


def rollup(
    pkg: PackageArtifact,
    analyses: list[FileAnalysis],
    threshold: float = MALICIOUS_THRESHOLD,
) -> PackageVerdict:
    """Package verdict: malicious iff any analyzed file's malware score
    strictly exceeds the threshold."""
    finals = [a.final_report for a in analyses if a.final_report is not None]
    max_malware = max((r.malware for r in finals), default=0.0)
    max_security = max((r.security_risk for r in finals), default=0.0)
    return PackageVerdict(
        package=pkg.name,
        version=pkg.version,
        label=pkg.label,
        file_analyses=tuple(analyses),
        max_malware_score=max_malware,
        max_security_risk=max_security,
        is_malicious=max_malware > threshold,
        triage_priority=max_malware,
    )


@dataclass
class RunCounters:
    files_total: int = 0
    files_analyzed: int = 0
    files_skipped: int = 0
    files_failed: int = 0
    files_not_selected: int = 0

    def to_dict(self) -> dict:
        return dict(vars(self))

    def conserve(self) -> bool:
        return self.files_total == (
            self.files_analyzed + self.files_skipped + self.files_failed + self.files_not_selected
        )


@dataclass
class RunResult:
    verdicts: list[PackageVerdict]
    counters: RunCounters
    ledger_dict: dict
    meta: dict
    prescreen: dict[str, dict[str, list[PreScreenFinding]]] = field(default_factory=dict)

    @property
    def has_failures(self) -> bool:
        return self.counters.files_failed > 0


def run_pipeline(
    manifest: DatasetManifest,
    mode: str,
    profile: ModelProfile,
    client: LLMClient,
    rules: RuleSet | None = None,
    budget_policy: str = "truncate_tail",
    parallelism: int = 4,
    seed: int | None = None,
    backend_name: str = "",
) -> RunResult:
    """Analyze every manifest package; in prescreened mode only flagged files.

    Files run on a bounded worker pool; each file's stage chain stays
    sequential. Partial failures are recorded per file and the run completes.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    rules = rules or default_rules()
    counters = RunCounters()
    verdicts: list[PackageVerdict] = []
    prescreen_by_pkg: dict[str, dict[str, list[PreScreenFinding]]] = {}
    lock = threading.Lock()

    def work(file: SourceFile) -> FileAnalysis:
        analysis = analyze_file(file, profile, client, budget_policy=budget_policy)
        with lock:
            if analysis.outcome == "analyzed":
                counters.files_analyzed += 1
            elif analysis.outcome == "skipped":
                counters.files_skipped += 1
            else:
                counters.files_failed += 1
        return analysis

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        for entry in manifest.entries:
            pkg = manifest.load_entry(entry)
            findings = scan_package(pkg, rules)
            prescreen_by_pkg[f"{pkg.name}@{pkg.version}"] = findings
            counters.files_total += pkg.file_count
            if mode == "prescreened":
                selected = [f for f in pkg.files if f.path in findings]
                counters.files_not_selected += pkg.file_count - len(selected)
            else:
                selected = list(pkg.files)
            analyses = list(pool.map(work, selected))
            analyses.sort(key=lambda a: a.file_path)
            verdicts.append(rollup(pkg, analyses))

    meta = {
        "mode": mode,
        "backend": backend_name,
        "model_id": profile.model_id,
        "n_initial_reports": profile.n_initial_reports,
        "context_tokens": profile.context_tokens,
        "budget_policy": budget_policy,
        "parallelism": parallelism,
        "seed": seed,
        "prompt_checksums": prompt_checksums(),
        "rule_count": len(rules),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    return RunResult(
        verdicts=verdicts,
        counters=counters,
        ledger_dict=client.ledger.to_dict(),
        meta=meta,
        prescreen=prescreen_by_pkg,
    )


def _report_to_json(report: AnalysisReport | None) -> dict | None:
    return None if report is None else report.to_artifact_dict()


def _analysis_to_json(analysis: FileAnalysis, findings: list[PreScreenFinding]) -> dict:
    return {
        "path": analysis.file_path,
        "outcome": analysis.outcome,
        "skipped": analysis.skipped,
        "failed": analysis.failed,
        "attempts": analysis.attempts,
        "final_report": _report_to_json(analysis.final_report),
        "stage1_reports": [_report_to_json(r) for r in analysis.stage1_reports],
        "stage2_reports": [_report_to_json(r) for r in analysis.stage2_reports],
        "prescreen_findings": [f.to_dict() for f in findings],
    }


def verdict_to_json(verdict: PackageVerdict, prescreen: dict[str, list[PreScreenFinding]]) -> dict:
    return {
        "package": verdict.package,
        "version": verdict.version,
        "label": verdict.label,
        "max_malware_score": verdict.max_malware_score,
        "max_security_risk": verdict.max_security_risk,
        "is_malicious": verdict.is_malicious,
        "triage_priority": verdict.triage_priority,
        "files": [
            _analysis_to_json(a, prescreen.get(a.file_path, []))
            for a in verdict.file_analyses
        ],
    }


def write_run_artifact(result: RunResult, out_dir: str | Path) -> Path:
    """Write verdicts.jsonl, ledger.json, and run_meta.json into out_dir.

    verdicts.jsonl carries no timestamps, so identical runs are
    byte-identical; volatile metadata lives in run_meta.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for verdict in result.verdicts:
        findings = result.prescreen.get(f"{verdict.package}@{verdict.version}", {})
        lines.append(json.dumps(verdict_to_json(verdict, findings), ensure_ascii=False))
    (out / "verdicts.jsonl").write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    (out / "ledger.json").write_text(json.dumps(result.ledger_dict, indent=2), encoding="utf-8")
    meta = dict(result.meta)
    meta["counters"] = result.counters.to_dict()
    (out / "run_meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    return out


@dataclass
class LoadedRun:
    """A run artifact read back for evaluation or serving."""

    path: Path
    verdicts: list[dict]
    ledger: dict
    meta: dict

    @property
    def counters(self) -> dict:
        return self.meta.get("counters", {})


def load_run(run_dir: str | Path) -> LoadedRun:
    run_dir = Path(run_dir)
    verdicts_path = run_dir / "verdicts.jsonl"
    if not verdicts_path.is_file():
        raise PkgSentryError(f"not a run artifact (no verdicts.jsonl): {run_dir}")
    verdicts = [
        json.loads(line)
        for line in verdicts_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    ledger_path = run_dir / "ledger.json"
    meta_path = run_dir / "run_meta.json"
    ledger = json.loads(ledger_path.read_text(encoding="utf-8")) if ledger_path.is_file() else {}
    meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.is_file() else {}
    return LoadedRun(path=run_dir, verdicts=verdicts, ledger=ledger, meta=meta)
