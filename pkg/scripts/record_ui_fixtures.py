#!/usr/bin/env python3
"""Record HTTP fixtures for the frontend contract tests.

Drives a scripted two-round session against the in-process service and
captures every request/response pair, plus the resulting trace, under
frontend/tests/fixtures/.  The frontend render tests replay these
payloads and assert that displayed numbers byte-match the recorded
server values.
"""

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from fastapi.testclient import TestClient

from persona.service import create_app

FIXTURE_DIR = REPO / "frontend" / "tests" / "fixtures"

# the scripted two-round inputs shared with the frontend flow test
SCRIPT = {
    "participant": "ui-fixture",
    "scenario_id": "teambuilding",
    "rounds": [
        {"confidence": 0.7, "counter_index": 0, "counter_confidence": 0.9,
         "ranking": ["m2", "m1", "m4", "m3"]},
        {"confidence": 0.9, "counter_index": 1, "counter_confidence": 0.5,
         "ranking": ["m4", "m2", "m1", "m3"]},
    ],
    "end_reason": "agreement_reached",
    "argument_ranking_reversed": True,
}


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    app = create_app(scenario_dir=REPO / "scenarios")
    exchanges = []

    with TestClient(app) as client:
        def call(name, method, path, body=None):
            resp = client.request(method, path, json=body)
            assert resp.status_code < 500, resp.text
            exchanges.append(
                {
                    "name": name,
                    "request": {"method": method, "path": path, "body": body},
                    "status": resp.status_code,
                    "response": resp.json(),
                }
            )
            return resp.json()

        call("scenarios", "GET", "/api/scenarios")
        view = call(
            "create",
            "POST",
            "/api/sessions",
            {"scenario_id": SCRIPT["scenario_id"], "participant": SCRIPT["participant"]},
        )
        sid = view["id"]
        for i, rnd in enumerate(SCRIPT["rounds"], start=1):
            view = call(
                f"round{i}_confidence",
                "POST",
                f"/api/sessions/{sid}/confidence",
                {"value": rnd["confidence"]},
            )
            choice = view["offered_counters"][rnd["counter_index"]]["id"]
            view = call(
                f"round{i}_counter",
                "POST",
                f"/api/sessions/{sid}/counter",
                {"choice_id": choice, "confidence": rnd["counter_confidence"]},
            )
            view = call(
                f"round{i}_ranking",
                "POST",
                f"/api/sessions/{sid}/ranking",
                {"order": rnd["ranking"]},
            )
        view = call(
            "end", "POST", f"/api/sessions/{sid}/end", {"reason": SCRIPT["end_reason"]}
        )
        presented = [ev["argument"] for ev in view["transcript"]]
        call(
            "argument_ranking",
            "POST",
            f"/api/sessions/{sid}/argument-ranking",
            {"order": list(reversed(presented))},
        )
        call("trace", "GET", f"/api/sessions/{sid}/trace")

    # session ids are random; normalize so fixtures are reproducible
    text = json.dumps(exchanges, indent=2, sort_keys=True)
    text = text.replace(sid, "SESSION")
    (FIXTURE_DIR / "session_flow.json").write_text(text + "\n")
    (FIXTURE_DIR / "script.json").write_text(
        json.dumps(SCRIPT, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {FIXTURE_DIR / 'session_flow.json'} ({len(exchanges)} exchanges)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
