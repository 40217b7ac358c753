"""HTTP service over a run artifact for human triage.

Read-only except for the verdict endpoint, which appends to a journal file
(`verdicts_reviewed.jsonl`) so reviewer work survives restarts. Restarting
the service over the same run directory reconstructs the same queue plus
the persisted verdicts.
"""

from __future__ import annotations

import hashlib
import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .reportjson import band_of
from .workflow import LoadedRun, load_run

VERDICT_CHOICES = ("malicious", "benign", "unsure")

DEFAULT_MIN_MALWARE = 0.5

JOURNAL_NAME = "verdicts_reviewed.jsonl"


def item_id(package: str, version: str, file_path: str) -> str:
    digest = hashlib.sha256(f"{package}@{version}:{file_path}".encode("utf-8")).hexdigest()
    return digest[:16]


class ReviewStore:
    """Review items derived from a run artifact plus the verdict journal."""

    def __init__(self, run: LoadedRun):
        self.run = run
        self.journal_path = run.path / JOURNAL_NAME
        self._lock = threading.Lock()
        self._items: dict[str, dict] = {}
        self._build_items()
        self._load_journal()

    def _build_items(self) -> None:
        for verdict in self.run.verdicts:
            for file_entry in verdict.get("files", []):
                final = file_entry.get("final_report")
                iid = item_id(verdict["package"], verdict["version"], file_entry["path"])
                malware = final["malware"] if final else None
                security = final["securityRisk"] if final else None
                self._items[iid] = {
                    "id": iid,
                    "package": verdict["package"],
                    "version": verdict["version"],
                    "file_path": file_entry["path"],
                    "outcome": file_entry.get("outcome", "analyzed"),
                    "skipped": file_entry.get("skipped"),
                    "failed": file_entry.get("failed"),
                    "malware": malware,
                    "security_risk": security,
                    "confidence": final["confidence"] if final else None,
                    "obfuscated": final["obfuscated"] if final else None,
                    "malware_band": band_of(malware, "malware") if final else None,
                    "security_band": band_of(security, "security_risk") if final else None,
                    "triage_priority": malware if malware is not None else 0.0,
                    "reviewer_verdict": None,
                    "reviewed_at": None,
                    "_detail": file_entry,
                }

    def _load_journal(self) -> None:
        if not self.journal_path.is_file():
            return
        for line in self.journal_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            item = self._items.get(row.get("id"))
            if item is not None:
                item["reviewer_verdict"] = row.get("verdict")
                item["reviewed_at"] = row.get("reviewed_at")

    def queue(self, min_malware: float, status: str) -> list[dict]:
        rows = []
        for item in self._items.values():
            malware = item["malware"]
            if malware is None:
                if min_malware > 0:
                    continue
            elif malware < min_malware:
                continue
            if status == "reviewed" and item["reviewer_verdict"] is None:
                continue
            if status == "unreviewed" and item["reviewer_verdict"] is not None:
                continue
            rows.append({k: v for k, v in item.items() if not k.startswith("_")})
        rows.sort(key=lambda r: (-r["triage_priority"], r["id"]))
        return rows

    def get(self, iid: str) -> dict | None:
        return self._items.get(iid)

    def record_verdict(self, iid: str, verdict: str, overwrite: bool) -> dict:
        with self._lock:
            item = self._items.get(iid)
            if item is None:
                raise KeyError(iid)
            if item["reviewer_verdict"] is not None and not overwrite:
                raise ValueError("verdict already recorded")
            stamp = datetime.now(timezone.utc).isoformat()
            with self.journal_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps({"id": iid, "verdict": verdict, "reviewed_at": stamp}) + "\n")
            item["reviewer_verdict"] = verdict
            item["reviewed_at"] = stamp
            return {k: v for k, v in item.items() if not k.startswith("_")}

    def summary(self) -> dict:
        bands: dict[str, int] = {}
        reviewed = 0
        for item in self._items.values():
            label = item["malware_band"] or "not analyzed"
            bands[label] = bands.get(label, 0) + 1
            if item["reviewer_verdict"] is not None:
                reviewed += 1
        return {
            "items": len(self._items),
            "reviewed": reviewed,
            "by_malware_band": dict(sorted(bands.items())),
        }


class VerdictBody(BaseModel):
    id: str
    verdict: Literal["malicious", "benign", "unsure"]


def create_app(run_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    store = ReviewStore(load_run(run_dir))
    app = FastAPI(title="pkgsentry triage")
    app.state.store = store

    @app.get("/api/queue")
    def queue(
        min_malware: float = Query(default=DEFAULT_MIN_MALWARE),
        status: str = Query(default="all"),
    ):
        if status not in ("all", "reviewed", "unreviewed"):
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        return {"items": store.queue(min_malware, status)}

    @app.get("/api/item/{iid}")
    def item(iid: str):
        found = store.get(iid)
        if found is None:
            raise HTTPException(status_code=404, detail=f"unknown item {iid!r}")
        row = {k: v for k, v in found.items() if not k.startswith("_")}
        row["detail"] = found["_detail"]
        return row

    @app.post("/api/verdict")
    def verdict(body: VerdictBody, overwrite: bool = Query(default=False)):
        try:
            return store.record_verdict(body.id, body.verdict, overwrite)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown item {body.id!r}")
        except ValueError:
            raise HTTPException(
                status_code=409,
                detail="verdict already recorded; pass ?overwrite=true to replace",
            )

    @app.get("/api/summary")
    def summary():
        return store.summary()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
