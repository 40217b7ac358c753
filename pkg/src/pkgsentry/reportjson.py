"""Tolerant parsing of model-produced analysis reports.

Model output is JSON-shaped but sloppy: markdown fences, chatty prefixes,
array-wrapped objects, trailing or missing commas, cut-off tails, missing
or extra keys, and out-of-range scores. ``parse_report`` repairs what it
can, records every repair as a violation note, and raises only when no
recognizable report structure remains.

List and object values in text fields are flattened to strings; raw control
characters inside strings are tolerated.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace

from .errors import PkgSentryError

TEXT_FIELDS = (
    "purpose",
    "sources",
    "sinks",
    "flows",
    "anomalies",
    "analysis",
    "conclusion",
)

SCORE_FIELDS = ("confidence", "obfuscated", "malware", "security_risk")

# Wire names in canonical order; securityRisk stays camelCase on the wire.
WIRE_KEYS = TEXT_FIELDS + ("confidence", "obfuscated", "malware", "securityRisk")

_WIRE_TO_FIELD = {**{k: k for k in TEXT_FIELDS + SCORE_FIELDS}, "securityRisk": "security_risk"}

# Template echoes: a model that "responds" with these has not analyzed anything.
TEMPLATE_TEXT = {
    "purpose": "Purpose of this source code",
    "sources": "Places where code reads input or data",
    "sinks": "Places where untrusted data can lead to potential data leak or effect",
    "flows": "Source-to-sink paths",
    "anomalies": "Places where code does anything unusual",
    "analysis": "Step-by-step analysis of the entire code fragment.",
    "conclusion": "Conclusions and short summary of your findings",
}

REPAIR_KINDS = (
    "stripped_prefix",
    "stripped_fence",
    "unwrapped_array",
    "trailing_comma",
    "inserted_comma",
    "missing_key_defaulted",
    "extra_key_dropped",
    "truncation_recovered",
    "score_clamped",
    "placeholder_text",
)

# Truncation repair needs most of the report present, or guessing dominates.
MIN_KEYS_FOR_TRUNCATION_REPAIR = 8


class ReportParseError(PkgSentryError):
    """Unrecoverable model output; carries the raw text for audit."""

    def __init__(self, message: str, raw: str):
        self.raw = raw
        super().__init__(message)


@dataclass(frozen=True)
class RepairNote:
    kind: str
    detail: str = ""


@dataclass(frozen=True)
class AnalysisReport:
    purpose: str = ""
    sources: str = ""
    sinks: str = ""
    flows: str = ""
    anomalies: str = ""
    analysis: str = ""
    conclusion: str = ""
    confidence: float = 0.0
    obfuscated: float = 0.0
    malware: float = 0.0
    security_risk: float = 0.0
    violations: tuple[RepairNote, ...] = field(default_factory=tuple)

    def to_wire_dict(self) -> dict:
        """Canonical report: the eleven wire keys in template order."""
        out = {k: getattr(self, k) for k in TEXT_FIELDS}
        out["confidence"] = self.confidence
        out["obfuscated"] = self.obfuscated
        out["malware"] = self.malware
        out["securityRisk"] = self.security_risk
        return out

    def to_artifact_dict(self) -> dict:
        out = self.to_wire_dict()
        out["violations"] = [{"kind": n.kind, "detail": n.detail} for n in self.violations]
        return out

    @classmethod
    def from_artifact_dict(cls, raw: dict) -> "AnalysisReport":
        notes = tuple(
            RepairNote(kind=n["kind"], detail=n.get("detail", ""))
            for n in raw.get("violations", [])
        )
        kwargs = {_WIRE_TO_FIELD[k]: raw[k] for k in WIRE_KEYS if k in raw}
        return cls(violations=notes, **kwargs)

    def has_violation(self, kind: str) -> bool:
        return any(n.kind == kind for n in self.violations)


def serialize_report(report: AnalysisReport) -> str:
    """Strict canonical JSON for a report (no array wrapper, wire key order)."""
    return json.dumps(report.to_wire_dict(), ensure_ascii=False)


_FENCE_RE = re.compile(r"```[a-zA-Z]*[ \t]*\n?(.*?)```", re.DOTALL)
_TRAILING_COMMA_RE = re.compile(r",(\s*[}\]])")
_MISSING_COMMA_STR_RE = re.compile(r'(?<!\\)"(\s+)"')
_MISSING_COMMA_NUM_RE = re.compile(r'(\d)(\s*\n\s*|[ \t]+)"')
_DANGLING_PAIR_RE = re.compile(r',\s*"[^"]*"?\s*:?\s*$')


def _scan_structure(text: str) -> tuple[bool, int, int]:
    """(inside_open_string, brace_depth, bracket_depth) ignoring string bodies."""
    in_str = False
    esc = False
    brace = 0
    bracket = 0
    for ch in text:
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "{":
            brace += 1
        elif ch == "}":
            brace -= 1
        elif ch == "[":
            bracket += 1
        elif ch == "]":
            bracket -= 1
    return in_str, brace, bracket


def _known_key_count(text: str) -> int:
    count = 0
    for key in TEXT_FIELDS + ("confidence", "obfuscated", "malware"):
        if f'"{key}"' in text:
            count += 1
    if '"securityRisk"' in text or '"security_risk"' in text:
        count += 1
    return count


def _try_load(text: str):
    try:
        return json.loads(text, strict=False)
    except json.JSONDecodeError:
        return None


def _strip_fence(text: str, notes: list[RepairNote]) -> str:
    match = _FENCE_RE.search(text)
    if match and match.group(1).strip():
        notes.append(RepairNote("stripped_fence", "removed markdown code fence"))
        return match.group(1)
    return text


def _strip_outside_json(text: str, notes: list[RepairNote]) -> str:
    starts = [i for i in (text.find("{"), text.find("[")) if i != -1]
    if not starts:
        raise ReportParseError("no JSON object or array found", text)
    start = min(starts)
    ends = [i for i in (text.rfind("}"), text.rfind("]")) if i != -1]
    end = max(ends) + 1 if ends and max(ends) >= start else len(text)
    removed = text[:start] + text[end:]
    if removed.strip():
        notes.append(
            RepairNote("stripped_prefix", f"removed {len(removed.strip())} chars around JSON")
        )
    return text[start:end]


def _swap_bare_brackets(text: str, notes: list[RepairNote]) -> str:
    """The response template wraps bare key-value pairs in [ ]; rewrite as
    an object. Arrays whose first element is an object are left alone."""
    stripped = text.strip()
    if stripped.startswith("[") and stripped.endswith("]") and _try_load(stripped) is None:
        inner = stripped[1:-1]
        if inner.lstrip().startswith('"') and re.search(r'"\s*:', inner):
            notes.append(RepairNote("unwrapped_array", "bracket-wrapped key-value list"))
            return "{" + inner + "}"
    return text


def _repair_commas(text: str, notes: list[RepairNote]) -> str:
    text, n_trailing = _TRAILING_COMMA_RE.subn(r"\1", text)
    if n_trailing:
        notes.append(RepairNote("trailing_comma", f"removed {n_trailing} trailing comma(s)"))
    text, n_str = _MISSING_COMMA_STR_RE.subn(r'",\1"', text)
    text, n_num = _MISSING_COMMA_NUM_RE.subn(r'\1,\2"', text)
    if n_str or n_num:
        notes.append(RepairNote("inserted_comma", f"inserted {n_str + n_num} missing comma(s)"))
    return text


def _recover_truncation(text: str) -> str | None:
    fixed = text.rstrip()
    in_str, _, _ = _scan_structure(fixed)
    if in_str:
        fixed += '"'
    fixed = _DANGLING_PAIR_RE.sub("", fixed)
    fixed = re.sub(r"[,:]\s*$", "", fixed)
    _, brace, bracket = _scan_structure(fixed)
    fixed += "}" * max(0, brace) + "]" * max(0, bracket)
    fixed = _TRAILING_COMMA_RE.sub(r"\1", fixed)
    return fixed if _try_load(fixed) is not None else None


def _unwrap(value, notes: list[RepairNote]):
    if isinstance(value, list):
        dicts = [v for v in value if isinstance(v, dict)]
        if not dicts:
            return None
        best = max(dicts, key=lambda d: sum(1 for k in d if k in _WIRE_TO_FIELD))
        notes.append(RepairNote("unwrapped_array", f"unwrapped array of {len(value)} element(s)"))
        return best
    if isinstance(value, dict):
        return value
    return None


def _flatten_text(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return ", ".join(_flatten_text(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, ensure_ascii=False)
    if value is None:
        return ""
    return str(value)


def _coerce_score(value) -> float | None:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            return None
    return None


def parse_report(raw: str) -> AnalysisReport:
    """Parse sloppy model output into an AnalysisReport.

    Repairs are applied in a fixed order and each one is recorded as a
    violation note. Raises ReportParseError when no report keys can be
    recognized at all.
    """
    if not raw or not raw.strip():
        raise ReportParseError("empty model output", raw or "")
    notes: list[RepairNote] = []

    text = _strip_fence(raw, notes)
    text = _strip_outside_json(text, notes)
    text = _swap_bare_brackets(text, notes)

    obj = _try_load(text)
    if obj is None:
        text = _repair_commas(text, notes)
        obj = _try_load(text)
    if obj is None and _known_key_count(text) >= MIN_KEYS_FOR_TRUNCATION_REPAIR:
        recovered = _recover_truncation(text)
        if recovered is not None:
            notes.append(RepairNote("truncation_recovered", "closed open strings/brackets"))
            obj = _try_load(recovered)
    if obj is not None:
        obj = _unwrap(obj, notes)
    if obj is None:
        raise ReportParseError("no recognizable report structure", raw)

    known = {k: v for k, v in obj.items() if k in _WIRE_TO_FIELD}
    if not known:
        raise ReportParseError("no recognizable report keys", raw)

    values: dict[str, object] = {}
    for key in TEXT_FIELDS:
        if key in obj:
            values[key] = _flatten_text(obj[key])
        else:
            values[key] = ""
            notes.append(RepairNote("missing_key_defaulted", key))
    for wire, fld in (
        ("confidence", "confidence"),
        ("obfuscated", "obfuscated"),
        ("malware", "malware"),
        ("securityRisk", "security_risk"),
    ):
        if wire in obj:
            raw_value, present = obj[wire], True
        elif wire == "securityRisk" and "security_risk" in obj:
            raw_value, present = obj["security_risk"], True
        else:
            raw_value, present = None, False
        score = _coerce_score(raw_value) if present else None
        if score is None:
            values[fld] = 0.0
            detail = f"{wire}: non-numeric" if present else wire
            notes.append(RepairNote("missing_key_defaulted", detail))
        else:
            values[fld] = score

    for key in obj:
        if key not in _WIRE_TO_FIELD:
            notes.append(RepairNote("extra_key_dropped", key))

    for fld in SCORE_FIELDS:
        score = values[fld]
        if isinstance(score, float) and math.isnan(score):
            values[fld] = 0.0
            notes.append(RepairNote("score_clamped", f"{fld}: NaN"))
        elif not 0.0 <= score <= 1.0:
            values[fld] = min(1.0, max(0.0, score))
            notes.append(RepairNote("score_clamped", f"{fld}: {score}"))

    for key in TEXT_FIELDS:
        if values[key] == TEMPLATE_TEXT[key]:
            notes.append(RepairNote("placeholder_text", key))

    return AnalysisReport(violations=tuple(notes), **values)


def validate_scores(report: AnalysisReport) -> list[str]:
    """Consistency flags between scores and report content."""
    flags = []
    conclusion_unusable = not report.conclusion.strip() or any(
        n.kind == "placeholder_text" and n.detail == "conclusion" for n in report.violations
    )
    if report.malware > 0.5 and conclusion_unusable:
        flags.append("high_malware_without_conclusion")
    if report.malware >= 0.75 and report.confidence < 0.25:
        flags.append("high_malware_low_confidence")
    if report.has_violation("score_clamped"):
        flags.append("score_clamped")
    return flags


_MALWARE_BANDS = (
    (0.75, "High probability of malicious behavior"),
    (0.5, "Likely malicious behavior"),
    (0.25, "Possibly malicious behavior"),
)

_SECURITY_BANDS = (
    (0.75, "Extremely dangerous, package should not be used"),
    (0.5, "Security alert should be reviewed"),
    (0.25, "Security warning, no immediate danger"),
)


def band_of(score: float, scale: str) -> str:
    """Map a score to its label band; boundaries belong to the upper band."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [0, 1]")
    if scale == "malware":
        if score == 0.0:
            return "No malicious intent"
        for cut, label in _MALWARE_BANDS:
            if score >= cut:
                return label
        return "Low possibility of malicious intent"
    if scale == "security_risk":
        for cut, label in _SECURITY_BANDS:
            if score >= cut:
                return label
        return "No significant threat; we can safely ignore"
    raise ValueError(f"unknown scale {scale!r}")
