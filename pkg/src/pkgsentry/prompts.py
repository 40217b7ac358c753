"""Prompt materialization, per-stage sampling parameters, and token budgeting.

The three system prompts (initial analysis, critique, final report) ship as
frozen resource files; tests pin their checksums so drift is caught. Every
rendered bundle carries a deterministic token estimate so budget decisions
are reproducible without a vendor tokenizer.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path
from typing import Callable

from .corpus import SourceFile, estimate_tokens
from .errors import ConfigurationError

STAGES = ("initial", "critique", "final")

TRUNCATION_MARKER = "[TRUNCATED BY SCANNER]"

USER_INSTRUCTION = (
    "Analyze the above code for malicious behavior. Remember to respond in the "
    "required JSON format. Consider ALL of the code carefully. Check the beginning, "
    "middle, and end of the code. Work step-by-step to get the right answer"
)

FILE_SECTION_HEADER = "--- FILE UNDER REVIEW ---"

MIN_COMPLETION_HEADROOM = 256


def _resource_text(name: str) -> str:
    return resources.files("pkgsentry").joinpath(f"resources/{name}").read_text(encoding="utf-8")


def initial_system_prompt() -> str:
    return _resource_text("prompt_initial.txt")


def critique_system_prompt(report_count: int) -> str:
    return _resource_text("prompt_critique.txt").replace("{X}", str(report_count))


def final_system_prompt(report_count: int) -> str:
    text = _resource_text("prompt_final.txt")
    text = text.replace("{X}", str(report_count))
    return text.replace("{INITIAL_SYSTEM_PROMPT}", initial_system_prompt().rstrip("\n"))


def prompt_checksums() -> dict[str, str]:
    """SHA-256 of each shipped prompt resource, for pinning and run metadata."""
    return {
        name: hashlib.sha256(_resource_text(f"prompt_{name}.txt").encode("utf-8")).hexdigest()
        for name in ("initial", "critique", "final")
    }


@dataclass(frozen=True)
class StageConfig:
    stage: str
    n_reports: int
    temperature: float
    top_p: float

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ConfigurationError(f"unknown stage {self.stage!r}")
        if self.n_reports < 1:
            raise ConfigurationError("n_reports must be positive")
        if self.stage == "final" and self.n_reports != 1:
            raise ConfigurationError("final stage produces exactly one report")
        if not 0.0 <= self.temperature <= 2.0:
            raise ConfigurationError("temperature out of [0, 2]")
        if not 0.0 < self.top_p <= 1.0:
            raise ConfigurationError("top_p out of (0, 1]")


# Sampling parameters per stage: wide exploration first, then progressively
# narrower settings as reports are critiqued and consolidated.
STAGE_DEFAULTS = {
    "initial": (1.0, 0.9),
    "critique": (0.75, 0.6),
    "final": (0.5, 0.5),
}


def default_stage_configs(n_initial_reports: int) -> dict[str, StageConfig]:
    return {
        "initial": StageConfig("initial", n_initial_reports, *STAGE_DEFAULTS["initial"]),
        "critique": StageConfig("critique", n_initial_reports, *STAGE_DEFAULTS["critique"]),
        "final": StageConfig("final", 1, *STAGE_DEFAULTS["final"]),
    }


def _to_micro_per_1k(value, where: str) -> int:
    try:
        dec = Decimal(str(value))
    except InvalidOperation as exc:
        raise ConfigurationError(f"{where}: bad price {value!r}") from exc
    micro = dec * 1_000_000
    if micro != micro.to_integral_value():
        raise ConfigurationError(f"{where}: price {value!r} finer than micro-dollars")
    return int(micro)


@dataclass(frozen=True)
class ModelProfile:
    model_id: str
    context_tokens: int
    n_initial_reports: int
    price_prompt_micro_per_1k: int
    price_completion_micro_per_1k: int
    completion_reserve_tokens: int
    stages: dict[str, StageConfig] | None = None

    def __post_init__(self):
        if self.context_tokens < self.completion_reserve_tokens + MIN_COMPLETION_HEADROOM:
            raise ConfigurationError(
                "context_tokens must exceed completion_reserve_tokens by at least "
                f"{MIN_COMPLETION_HEADROOM}"
            )
        if self.n_initial_reports < 1:
            raise ConfigurationError("n_initial_reports must be positive")

    def stage_configs(self) -> dict[str, StageConfig]:
        return self.stages or default_stage_configs(self.n_initial_reports)

    @property
    def price_prompt_per_1k(self) -> Decimal:
        return Decimal(self.price_prompt_micro_per_1k) / 1_000_000

    @property
    def price_completion_per_1k(self) -> Decimal:
        return Decimal(self.price_completion_micro_per_1k) / 1_000_000


def _profile_from_dict(raw: dict, where: str) -> ModelProfile:
    required = {
        "model_id",
        "context_tokens",
        "n_initial_reports",
        "price_prompt_per_1k",
        "price_completion_per_1k",
        "completion_reserve_tokens",
    }
    missing = required - set(raw)
    if missing:
        raise ConfigurationError(f"{where}: profile missing fields {sorted(missing)}")
    stages = None
    if "stages" in raw:
        stages = {}
        for stage_name, cfg in raw["stages"].items():
            temperature, top_p = STAGE_DEFAULTS.get(stage_name, (1.0, 1.0))
            stages[stage_name] = StageConfig(
                stage=stage_name,
                n_reports=cfg.get(
                    "n_reports", 1 if stage_name == "final" else raw["n_initial_reports"]
                ),
                temperature=cfg.get("temperature", temperature),
                top_p=cfg.get("top_p", top_p),
            )
    return ModelProfile(
        model_id=raw["model_id"],
        context_tokens=int(raw["context_tokens"]),
        n_initial_reports=int(raw["n_initial_reports"]),
        price_prompt_micro_per_1k=_to_micro_per_1k(raw["price_prompt_per_1k"], where),
        price_completion_micro_per_1k=_to_micro_per_1k(raw["price_completion_per_1k"], where),
        completion_reserve_tokens=int(raw["completion_reserve_tokens"]),
        stages=stages,
    )


SHIPPED_PROFILES = ("gpt3", "gpt4")


def load_profile(name_or_path: str | Path) -> ModelProfile:
    """Load a model profile from a JSON file or by shipped name (gpt3, gpt4)."""
    name_or_path = str(name_or_path)
    if name_or_path in SHIPPED_PROFILES:
        raw = json.loads(_resource_text(f"profiles/{name_or_path}.json"))
        return _profile_from_dict(raw, f"profiles/{name_or_path}.json")
    path = Path(name_or_path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot load profile {path}: {exc}") from exc
    return _profile_from_dict(raw, str(path))


@dataclass(frozen=True)
class SkipSignal:
    """A deliberate skip, distinguishable from a failure."""

    file_path: str
    reason: str


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    stage: str
    file_path: str
    token_estimate: int


def _bundle(
    system_text: str,
    user_text: str,
    stage: str,
    file_path: str,
    estimator: Callable[[str], int],
) -> PromptBundle:
    return PromptBundle(
        system_text=system_text,
        user_text=user_text,
        stage=stage,
        file_path=file_path,
        token_estimate=estimator(system_text) + estimator(user_text),
    )


def render_initial(
    file: SourceFile,
    estimator: Callable[[str], int] = estimate_tokens,
    empty_policy: str = "skip",
) -> PromptBundle | SkipSignal:
    """First-stage bundle: the file content followed by the user instruction."""
    if not file.content.strip():
        if empty_policy == "skip":
            return SkipSignal(file.path, "empty file content")
        raise ValueError(f"empty file content: {file.path}")
    user_text = f"{file.content}\n\n{USER_INSTRUCTION}"
    return _bundle(initial_system_prompt(), user_text, "initial", file.path, estimator)


def _reports_section(reports: list[str]) -> str:
    parts = []
    for i, text in enumerate(reports, start=1):
        parts.append(f"Report {i}:\n{text}")
    return "\n\n".join(parts)


def render_critique(
    file: SourceFile,
    prior_reports: list[str],
    estimator: Callable[[str], int] = estimate_tokens,
) -> PromptBundle:
    """Critique-stage bundle: enumerated prior reports, then the file."""
    if not prior_reports:
        raise ValueError("prior_reports must be non-empty")
    user_text = (
        f"{_reports_section(prior_reports)}\n\n{FILE_SECTION_HEADER}\n{file.content}"
    )
    return _bundle(
        critique_system_prompt(len(prior_reports)), user_text, "critique", file.path, estimator
    )


def render_final(
    file: SourceFile,
    critique_reports: list[str],
    estimator: Callable[[str], int] = estimate_tokens,
) -> PromptBundle:
    """Final-stage bundle: enumerated critique reports, then the file."""
    if not critique_reports:
        raise ValueError("critique_reports must be non-empty")
    user_text = (
        f"{_reports_section(critique_reports)}\n\n{FILE_SECTION_HEADER}\n{file.content}"
    )
    return _bundle(
        final_system_prompt(len(critique_reports)), user_text, "final", file.path, estimator
    )


def budget_fit(
    bundle: PromptBundle,
    profile: ModelProfile,
    policy: str = "truncate_tail",
    estimator: Callable[[str], int] = estimate_tokens,
) -> PromptBundle | SkipSignal:
    """Fit a bundle into the model context, leaving the completion reserve.

    The user budget is what remains of the context after the system prompt
    estimate and the completion reserve. Oversized user text is either cut
    (with an explicit marker line appended) or skipped, by policy.
    """
    if policy not in ("truncate_tail", "skip"):
        raise ValueError(f"unknown budget policy {policy!r}")
    system_est = estimator(bundle.system_text)
    user_budget = profile.context_tokens - system_est - profile.completion_reserve_tokens
    if user_budget <= 0:
        raise ConfigurationError(
            f"system prompt ({system_est} tokens) leaves no user budget in a "
            f"{profile.context_tokens}-token context with "
            f"{profile.completion_reserve_tokens} reserved"
        )
    if estimator(bundle.user_text) <= user_budget:
        return bundle
    if policy == "skip":
        return SkipSignal(bundle.file_path, "user text exceeds token budget")

    suffix = "\n" + TRUNCATION_MARKER
    marker_tokens = estimator(suffix)
    keep_chars = (user_budget - marker_tokens) * 4
    if keep_chars <= 0:
        return SkipSignal(bundle.file_path, "token budget below truncation marker size")
    truncated = bundle.user_text[:keep_chars] + suffix
    # Non-default estimators may count denser than chars/4; halve until it fits.
    while keep_chars > 0 and estimator(truncated) > user_budget:
        keep_chars //= 2
        truncated = bundle.user_text[:keep_chars] + suffix
    if estimator(truncated) > user_budget:
        return SkipSignal(bundle.file_path, "token budget below truncation marker size")
    return replace(
        bundle,
        user_text=truncated,
        token_estimate=system_est + estimator(truncated),
    )
