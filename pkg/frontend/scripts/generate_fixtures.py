"""Rebuild the JSON fixtures the UI tests run against.

Drives the real pipeline over the shared test corpus, then snapshots the
API responses. Run from the repository root:

    python3 frontend/scripts/generate_fixtures.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient

from conftest import CORPUS, make_profile
from regdedup import RunStore, SimilarityConfig, conflate_claims, extend_sets, run_dedup
from regdedup.api import create_app

OUT = ROOT / "frontend" / "tests" / "fixtures"


def main() -> None:
    profiles = [make_profile(*row) for row in CORPUS]
    with tempfile.TemporaryDirectory() as tmp:
        store = RunStore(Path(tmp) / "run", create=True)
        store.write_ingest(profiles, [])
        conflation = conflate_claims(profiles)
        store.write_conflation(conflation)
        dedup = run_dedup(profiles)
        store.write_dedup(dedup, SimilarityConfig())
        store.write_merge(extend_sets(conflation.sets, dedup.clusters))

        client = TestClient(create_app(store))
        run = client.get("/api/run").json()
        listing = client.get("/api/sets", params={"pageSize": 500}).json()
        details = {
            item["id"]: client.get(f"/api/sets/{item['id']}").json()
            for item in listing["items"]
        }
        stats = client.get("/api/stats").json()

    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in (("run", run), ("details", details), ("stats", stats)):
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
