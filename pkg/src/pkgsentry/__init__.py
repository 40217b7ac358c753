"""pkgsentry: malicious npm package review pipeline.

Static pre-screening rules flag suspicious files; flagged (or all) files run
through a three-stage analysis chain (initial reports, critique, final
report) against a live, replayed, or deterministic mock model backend;
file scores roll up to package verdicts; runs are scored against labeled
manifests.
"""

__version__ = "0.1.0"
