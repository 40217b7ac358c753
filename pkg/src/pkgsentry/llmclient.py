"""Chat-completion client with live, replay, and mock backends.

The live backend talks to an OpenAI-compatible endpoint with retries and
rate limiting. The replay backend answers from a recorded cassette keyed by
request content hash. The mock backend is a deterministic analyst driven by
the prescreen rule engine, which makes the whole pipeline runnable offline.

Costs accumulate in integer nanodollars so ledger totals are exact and
reproducible; no floating point touches money.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

import httpx

from .errors import ConfigurationError, PkgSentryError
from .prescreen import RuleSet, categories_of, default_rules, scan_content
from .prompts import (
    FILE_SECTION_HEADER,
    TRUNCATION_MARKER,
    USER_INSTRUCTION,
    ModelProfile,
)
from .corpus import estimate_tokens
from .reportjson import AnalysisReport, parse_report, serialize_report

API_KEY_ENV = "PKGSENTRY_API_KEY"

BACKENDS = ("live", "replay", "mock")


class CassetteMissError(PkgSentryError):
    def __init__(self, request_key: str):
        self.request_key = request_key
        super().__init__(f"no cassette entry for request {request_key}")


class TransportError(PkgSentryError):
    """Live call failed after exhausting retries."""


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    system_text: str
    user_text: str
    temperature: float
    top_p: float
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def request_key(self) -> str:
        payload = json.dumps(
            {
                "model_id": self.model_id,
                "system_text": self.system_text,
                "user_text": self.user_text,
                "temperature": self.temperature,
                "top_p": self.top_p,
                "n": self.n,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatResponse:
    texts: tuple[str, ...]
    prompt_tokens: int
    completion_tokens: int
    backend: str


class Cassette:
    """Recorded responses keyed by request content hash; lookups never mutate."""

    def __init__(self, model_id: str = "", created_at: str = ""):
        self.model_id = model_id
        self.created_at = created_at
        self._entries: dict[str, dict] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def put(self, request_key: str, response: ChatResponse) -> None:
        with self._lock:
            self._entries[request_key] = {
                "texts": list(response.texts),
                "prompt_tokens": response.prompt_tokens,
                "completion_tokens": response.completion_tokens,
                "model_id": self.model_id,
            }

    def get(self, request_key: str) -> ChatResponse:
        entry = self._entries.get(request_key)
        if entry is None:
            raise CassetteMissError(request_key)
        return ChatResponse(
            texts=tuple(entry["texts"]),
            prompt_tokens=entry["prompt_tokens"],
            completion_tokens=entry["completion_tokens"],
            backend="replay",
        )

    def save(self, path: str | Path) -> None:
        payload = {
            "metadata": {"created_at": self.created_at, "model_id": self.model_id},
            "entries": dict(sorted(self._entries.items())),
        }
        Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Cassette":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot load cassette {path}: {exc}") from exc
        meta = payload.get("metadata", {})
        cassette = cls(model_id=meta.get("model_id", ""), created_at=meta.get("created_at", ""))
        cassette._entries = payload.get("entries", {})
        return cassette


class CostLedger:
    """Per-model token and cost accounting in integer nanodollars."""

    def __init__(self):
        self._lock = threading.Lock()
        self._prices: dict[str, tuple[int, int]] = {}
        self._models: dict[str, dict[str, int]] = {}

    def register_model(self, profile: ModelProfile) -> None:
        self._prices[profile.model_id] = (
            profile.price_prompt_micro_per_1k,
            profile.price_completion_micro_per_1k,
        )

    def record(self, model_id: str, prompt_tokens: int, completion_tokens: int) -> None:
        price_prompt, price_completion = self._prices.get(model_id, (0, 0))
        with self._lock:
            acc = self._models.setdefault(
                model_id,
                {"calls": 0, "prompt_tokens": 0, "completion_tokens": 0, "cost_nanodollars": 0},
            )
            acc["calls"] += 1
            acc["prompt_tokens"] += prompt_tokens
            acc["completion_tokens"] += completion_tokens
            # price is micro-dollars per 1K tokens, so tokens * price = nanodollars
            acc["cost_nanodollars"] += (
                prompt_tokens * price_prompt + completion_tokens * price_completion
            )

    @property
    def total_cost_nanodollars(self) -> int:
        return sum(acc["cost_nanodollars"] for acc in self._models.values())

    @property
    def total_cost(self) -> Decimal:
        return Decimal(self.total_cost_nanodollars) / 1_000_000_000

    def to_dict(self) -> dict:
        models = {}
        for model_id in sorted(self._models):
            acc = self._models[model_id]
            models[model_id] = {
                **acc,
                "cost_dollars": str(Decimal(acc["cost_nanodollars"]) / 1_000_000_000),
            }
        return {
            "models": models,
            "total": {
                "calls": sum(a["calls"] for a in self._models.values()),
                "prompt_tokens": sum(a["prompt_tokens"] for a in self._models.values()),
                "completion_tokens": sum(a["completion_tokens"] for a in self._models.values()),
                "cost_nanodollars": self.total_cost_nanodollars,
                "cost_dollars": str(self.total_cost),
            },
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")


def ledger_report(ledger: CostLedger) -> dict:
    """Cost summary: per-model and total tokens, calls, and dollars."""
    return ledger.to_dict()


def percent_reduction(before: int, after: int) -> str:
    """Reduction from before to after as a 1-decimal percentage string.

    The remaining share is floor-truncated to one decimal and the reduction
    is its complement, e.g. 18754 -> 4146 yields "77.9". Inputs are integer
    unit counts (files, nanodollars); the arithmetic is exact.
    """
    if before <= 0:
        raise ValueError("before must be positive")
    if after < 0:
        raise ValueError("after must be non-negative")
    remaining_permille = (after * 1000) // before
    reduction_permille = 1000 - remaining_permille
    return f"{reduction_permille // 10}.{reduction_permille % 10}"


class RateLimiter:
    """Sliding-window limiter: at most R dispatches in any 60-second window."""

    WINDOW_SECONDS = 60.0

    def __init__(self, max_per_minute: int, clock=time.monotonic, sleeper=time.sleep):
        if max_per_minute < 1:
            raise ValueError("max_per_minute must be positive")
        self.max_per_minute = max_per_minute
        self._clock = clock
        self._sleeper = sleeper
        self._times: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                # keep dispatches exactly 60s old so closed windows stay bounded
                while self._times and self._times[0] < now - self.WINDOW_SECONDS:
                    self._times.popleft()
                if len(self._times) < self.max_per_minute:
                    self._times.append(now)
                    return
                wait = self._times[0] + self.WINDOW_SECONDS - now
            self._sleeper(max(wait, 1e-6))


_MILLI = 1000


def _mock_scores(categories: set[str], has_findings: bool) -> dict[str, float]:
    """Frozen mock-analyst scoring, computed in integer milli-units."""
    c = len(categories)
    malware_milli = min(_MILLI, 350 * c + (300 if "network" in categories else 0))
    security_milli = max(malware_milli, min(_MILLI, 250 * c))
    obfuscated_milli = 800 if "obfuscation_encoding" in categories else 50
    confidence_milli = 900 if has_findings else 600
    return {
        "malware": malware_milli / _MILLI,
        "security_risk": security_milli / _MILLI,
        "obfuscated": obfuscated_milli / _MILLI,
        "confidence": confidence_milli / _MILLI,
    }


_REPORT_SPLIT_RE = re.compile(r"(?m)^Report \d+:\n")


def _split_user_text(user_text: str) -> tuple[list[str], str]:
    """(embedded report texts, file content) from a rendered user prompt."""
    if FILE_SECTION_HEADER in user_text:
        reports_part, content = user_text.split(FILE_SECTION_HEADER, 1)
        content = content.removeprefix("\n")
        reports = [r.strip() for r in _REPORT_SPLIT_RE.split(reports_part) if r.strip()]
        return reports, content
    content = user_text
    if content.endswith("\n" + TRUNCATION_MARKER):
        content = content[: -len("\n" + TRUNCATION_MARKER)]
    if content.endswith(USER_INSTRUCTION):
        content = content[: -len(USER_INSTRUCTION)].rstrip("\n")
    return [], content


def _detect_stage(system_text: str) -> str:
    if system_text.startswith("Your role is a security researcher"):
        return "critique"
    if system_text.startswith("As an experienced JavaScript cybersecurity analyst"):
        return "final"
    return "initial"


def _mock_initial_report(content: str, rules: RuleSet) -> AnalysisReport:
    findings = scan_content(content, rules)
    categories = sorted(categories_of(findings))
    scores = _mock_scores(set(categories), bool(findings))
    if findings:
        by_rule = ", ".join(
            f"{f.rule_id} at line {f.line}" for f in findings[:12]
        )
        sources = "; ".join(sorted({f.excerpt for f in findings if f.category == "sensitive_data_exposure"})) or "No sensitive input reads identified."
        sinks = "; ".join(sorted({f.excerpt for f in findings if f.category == "network"})) or "No outbound sinks identified."
        if "network" in categories and "sensitive_data_exposure" in categories:
            conclusion = (
                "Behavior consistent with data exfiltration: system or user "
                "information is gathered and sent to an external endpoint. "
                f"Categories: {', '.join(categories)}."
            )
        else:
            conclusion = f"Suspicious indicators present in categories: {', '.join(categories)}."
        report = AnalysisReport(
            purpose="Automated triage of the submitted file based on static suspicious-pattern analysis.",
            sources=sources,
            sinks=sinks,
            flows=(
                "Matched patterns suggest data may flow from local context to the flagged sinks."
                if "network" in categories
                else "No source-to-sink flow established."
            ),
            anomalies=f"Rule hits: {by_rule}.",
            analysis=f"Static scan matched {len(findings)} pattern(s) across categories: {', '.join(categories)}.",
            conclusion=conclusion,
            **scores,
        )
    else:
        report = AnalysisReport(
            purpose="Automated triage of the submitted file based on static suspicious-pattern analysis.",
            sources="No suspicious input reads identified.",
            sinks="No suspicious sinks identified.",
            flows="No source-to-sink flow established.",
            anomalies="No anomalies matched the active rule set.",
            analysis="Static scan matched no suspicious patterns.",
            conclusion="No malicious indicators found by the rule-driven analyst.",
            **scores,
        )
    return report


def mock_analyze(req: ChatRequest, rules: RuleSet | None = None) -> ChatResponse:
    """Deterministic rule-driven analyst standing in for a live model.

    Initial stage scans the embedded file content and scores it with the
    frozen formula; critique echoes the prior reports' scores; final
    reproduces the highest-confidence input report.
    """
    rules = rules or default_rules()
    stage = _detect_stage(req.system_text)
    embedded_reports, content = _split_user_text(req.user_text)

    if stage == "initial":
        report_text = serialize_report(_mock_initial_report(content, rules))
        texts = tuple([report_text] * req.n)
    else:
        parsed: list[AnalysisReport] = []
        for text in embedded_reports:
            try:
                parsed.append(parse_report(text))
            except Exception:
                continue
        if not parsed:
            parsed = [_mock_initial_report(content, rules)]
        if stage == "critique":
            texts = tuple(
                serialize_report(parsed[i % len(parsed)]) for i in range(req.n)
            )
        else:
            best = max(parsed, key=lambda r: r.confidence)
            texts = tuple([serialize_report(best)] * req.n)

    return ChatResponse(
        texts=texts,
        prompt_tokens=estimate_tokens(req.system_text) + estimate_tokens(req.user_text),
        completion_tokens=sum(estimate_tokens(t) for t in texts),
        backend="mock",
    )


class MockBackend:
    name = "mock"

    def __init__(self, rules: RuleSet | None = None):
        self.rules = rules or default_rules()

    def complete(self, req: ChatRequest) -> ChatResponse:
        return mock_analyze(req, self.rules)


class ReplayBackend:
    name = "replay"

    def __init__(self, cassette: Cassette):
        self.cassette = cassette

    def complete(self, req: ChatRequest) -> ChatResponse:
        return self.cassette.get(req.request_key)


class LiveBackend:
    """OpenAI-compatible chat completions over HTTPS with retry."""

    name = "live"

    DEFAULT_MAX_ATTEMPTS = 5
    RETRYABLE_STATUS = {429, 500, 502, 503, 504}

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        http_client: httpx.Client | None = None,
        sleeper=time.sleep,
        rng: random.Random | None = None,
    ):
        api_key = api_key or os.environ.get(API_KEY_ENV)
        if not api_key:
            raise ConfigurationError(
                f"live backend requires an API key via {API_KEY_ENV} or configuration"
            )
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self.max_attempts = max_attempts
        self._client = http_client or httpx.Client(timeout=60.0)
        self._sleeper = sleeper
        self._rng = rng or random.Random()

    def complete(self, req: ChatRequest) -> ChatResponse:
        payload = {
            "model": req.model_id,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "top_p": req.top_p,
            "n": req.n,
        }
        last_error = "no attempt made"
        for attempt in range(self.max_attempts):
            if attempt:
                backoff = 0.5 * 2 ** (attempt - 1) + self._rng.uniform(0, 0.25)
                self._sleeper(backoff)
            try:
                resp = self._client.post(
                    f"{self.endpoint}/v1/chat/completions",
                    json=payload,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                )
            except httpx.HTTPError as exc:
                last_error = f"transport failure: {exc}"
                continue
            if resp.status_code in self.RETRYABLE_STATUS:
                last_error = f"retryable HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:500]}")
            body = resp.json()
            texts = tuple(
                choice.get("message", {}).get("content") or ""
                for choice in body.get("choices", [])
            )
            if len(texts) != req.n or any(not t.strip() for t in texts):
                # model refused or produced nothing; retry rather than
                # letting an empty report pass as benign
                last_error = "incomplete or empty completion set"
                continue
            usage = body.get("usage", {})
            return ChatResponse(
                texts=texts,
                prompt_tokens=int(usage.get("prompt_tokens", 0)),
                completion_tokens=int(usage.get("completion_tokens", 0)),
                backend="live",
            )
        raise TransportError(f"exhausted {self.max_attempts} attempts: {last_error}")


@dataclass
class LLMClient:
    """Backend wrapper adding rate limiting, recording, and cost accounting."""

    backend: MockBackend | ReplayBackend | LiveBackend
    ledger: CostLedger = field(default_factory=CostLedger)
    recording: Cassette | None = None
    limiter: RateLimiter | None = None

    def complete(self, req: ChatRequest) -> ChatResponse:
        if self.limiter is not None:
            self.limiter.acquire()
        response = self.backend.complete(req)
        if self.recording is not None:
            self.recording.put(req.request_key, response)
        self.ledger.record(req.model_id, response.prompt_tokens, response.completion_tokens)
        return response
