"""Static pre-screening rule engine.

Rules are data: literal or regex patterns grouped into six detection
categories. Scanning is pure and deterministic, so the same rules over the
same content always produce the same findings. The engine is intentionally
recall-oriented triage; precision is the analysis pipeline's job.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .corpus import PackageArtifact, SourceFile
from .errors import ConfigurationError

CATEGORIES = (
    "code_injection",
    "sensitive_data_exposure",
    "network",
    "file_system_access",
    "obfuscation_encoding",
    "miscellaneous",
)

SEVERITIES = ("info", "warn", "alert")

EXCERPT_LIMIT = 120

INSTALL_HOOK_RULE_ID = "MISC-001"


@dataclass(frozen=True)
class Rule:
    id: str
    category: str
    pattern: str
    pattern_kind: str
    severity: str
    description: str

    def compile(self) -> re.Pattern[str]:
        if self.pattern_kind == "literal":
            return re.compile(re.escape(self.pattern))
        if self.pattern_kind == "regex":
            try:
                return re.compile(self.pattern)
            except re.error as exc:
                raise ConfigurationError(
                    f"rule {self.id}: bad regex {self.pattern!r}: {exc}"
                ) from exc
        raise ConfigurationError(f"rule {self.id}: unknown pattern_kind {self.pattern_kind!r}")


@dataclass(frozen=True)
class PreScreenFinding:
    rule_id: str
    category: str
    file_path: str
    line: int
    excerpt: str

    def to_dict(self) -> dict:
        return asdict(self)


class RuleSet:
    """A validated collection of rules with precompiled matchers."""

    def __init__(self, rules: list[Rule]):
        seen: set[str] = set()
        for rule in rules:
            if rule.id in seen:
                raise ConfigurationError(f"duplicate rule id {rule.id!r}")
            if rule.category not in CATEGORIES:
                raise ConfigurationError(
                    f"rule {rule.id}: unknown category {rule.category!r}"
                )
            if rule.severity not in SEVERITIES:
                raise ConfigurationError(
                    f"rule {rule.id}: unknown severity {rule.severity!r}"
                )
            seen.add(rule.id)
        self.rules = tuple(rules)
        self._compiled = [(rule, rule.compile()) for rule in rules]

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def ids(self) -> set[str]:
        return {rule.id for rule in self.rules}


def _parse_rule(row: dict, where: str) -> Rule:
    missing = {"id", "category", "pattern", "pattern_kind", "severity", "description"} - set(row)
    if missing:
        raise ConfigurationError(f"{where}: rule missing fields {sorted(missing)}")
    return Rule(
        id=row["id"],
        category=row["category"],
        pattern=row["pattern"],
        pattern_kind=row["pattern_kind"],
        severity=row["severity"],
        description=row["description"],
    )


def load_rules(path: str | Path) -> RuleSet:
    """Load a rule set from a JSON file (list of rule objects)."""
    path = Path(path)
    try:
        rows = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot load rules from {path}: {exc}") from exc
    if not isinstance(rows, list):
        raise ConfigurationError(f"{path}: rule file must be a JSON list")
    return RuleSet([_parse_rule(row, str(path)) for row in rows])


def default_rules() -> RuleSet:
    """The built-in rule set shipped with the package."""
    raw = resources.files("pkgsentry").joinpath("resources/default_rules.json").read_text()
    return RuleSet([_parse_rule(row, "default_rules.json") for row in json.loads(raw)])


# The install-hook rule also runs structurally in scan_package so manifests
# with install scripts are flagged even under user rule sets that omit it.
_INSTALL_HOOK_RULE = Rule(
    id=INSTALL_HOOK_RULE_ID,
    category="miscellaneous",
    pattern=r'"(?:pre|post)?install"\s*:\s*"[^"]*\S[^"]*"',
    pattern_kind="regex",
    severity="warn",
    description="package manifest declares an install-time script hook",
)


def _line_starts(content: str) -> list[int]:
    starts = [0]
    for i, ch in enumerate(content):
        if ch == "\n":
            starts.append(i + 1)
    return starts


def _line_of(starts: list[int], offset: int) -> int:
    lo, hi = 0, len(starts) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if starts[mid] <= offset:
            lo = mid
        else:
            hi = mid - 1
    return lo + 1


def _excerpt(content: str, starts: list[int], line: int) -> str:
    begin = starts[line - 1]
    end = starts[line] - 1 if line < len(starts) else len(content)
    return content[begin:end].strip()[:EXCERPT_LIMIT]


def scan_file(file: SourceFile, rules: RuleSet) -> list[PreScreenFinding]:
    """All rule matches in one file, ordered by (line, rule_id).

    At most one finding is reported per rule per line.
    """
    if len(rules) == 0:
        raise ConfigurationError("rule set is empty")
    starts = _line_starts(file.content)
    findings: dict[tuple[int, str], PreScreenFinding] = {}
    for rule, matcher in rules._compiled:
        for match in matcher.finditer(file.content):
            line = _line_of(starts, match.start())
            key = (line, rule.id)
            if key in findings:
                continue
            findings[key] = PreScreenFinding(
                rule_id=rule.id,
                category=rule.category,
                file_path=file.path,
                line=line,
                excerpt=_excerpt(file.content, starts, line),
            )
    return [findings[key] for key in sorted(findings)]


def scan_package(pkg: PackageArtifact, rules: RuleSet) -> dict[str, list[PreScreenFinding]]:
    """Findings per file path; files without findings are omitted.

    Manifest install hooks (preinstall/install/postinstall with a command)
    always yield a miscellaneous finding, whether or not the active rule
    set carries the hook rule.
    """
    hook_only = RuleSet([_INSTALL_HOOK_RULE])
    result: dict[str, list[PreScreenFinding]] = {}
    for file in pkg.files:
        findings = scan_file(file, rules)
        if file.kind == "manifest" and INSTALL_HOOK_RULE_ID not in rules.ids():
            seen = {(f.line, f.rule_id) for f in findings}
            extra = [
                f for f in scan_file(file, hook_only) if (f.line, f.rule_id) not in seen
            ]
            findings = sorted(findings + extra, key=lambda f: (f.line, f.rule_id))
        if findings:
            result[file.path] = findings
    return result


def scan_content(content: str, rules: RuleSet, path: str = "<input>") -> list[PreScreenFinding]:
    """Scan bare text (used by the deterministic mock analyst)."""
    return scan_file(SourceFile.from_bytes(path, content.encode("utf-8")), rules)


def categories_of(findings: list[PreScreenFinding]) -> set[str]:
    return {f.category for f in findings}


def export_findings(findings: list[PreScreenFinding]) -> str:
    """Findings as a JSON list for interchange."""
    return json.dumps([f.to_dict() for f in findings], indent=2)
