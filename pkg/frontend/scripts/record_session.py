"""Record a live gateway session for the console contract tests.

Drives the real HTTP app in-process and writes every exchange (request
method/path/role/body plus response status/body) to
frontend/tests/recorded_session.json. The console test suite replays these
payloads; regenerate the file whenever the gateway contract changes:

    python frontend/scripts/record_session.py
"""

from __future__ import annotations

import dataclasses
import json
import re
from pathlib import Path

from fastapi.testclient import TestClient

from ledgerair.gateway.app import create_app
from ledgerair.harness.scenario import parse_scenario
from ledgerair.harness.system import build_system, run_workload

OUT = Path(__file__).resolve().parent.parent / "tests" / "recorded_session.json"

HEADERS = {
    "customer": {"Authorization": "Bearer customer-dev-token"},
    "admin": {"Authorization": "Bearer admin-dev-token"},
    "anonymous": {},
}

SCENARIO = {
    "name": "console-recording",
    "seed": "console-1",
    "cluster": {"n_nodes": 4},
    "flights": [
        {"flight": "BG-147", "route": "DAC-CGP", "departure_time": 500, "fare": 12000, "capacity": 20},
        {"flight": "BG-901", "route": "DAC-ZYL", "departure_time": 100000, "fare": 10000, "capacity": 1},
    ],
    "workload": {"bookings": 1, "customers": 2},
    # one capture for the workload booking, then the scripted API calls below
    "payment_script": ["ok", "ok", "ok", "ok", "timeout"],
}

CRASH_SCENARIO = {
    "name": "console-crash",
    "seed": "console-2",
    "cluster": {"n_nodes": 4},
    "flights": [
        {"flight": "BG-147", "route": "DAC-CGP", "departure_time": 500, "fare": 12000, "capacity": 20}
    ],
    "workload": {"bookings": 6, "customers": 3},
    "fault_plan": [{"kind": "crash", "node": "node-2", "tick": 5}],
}


def main() -> None:
    scenario = parse_scenario(SCENARIO)
    system = build_system(scenario)
    run_workload(system, scenario)
    system.settle_cluster()
    client = TestClient(create_app(system))

    exchanges: list[dict] = []

    def record(name: str, method: str, path: str, role: str = "customer", body: dict | None = None) -> dict:
        kwargs = {"headers": HEADERS[role]}
        if body is not None:
            kwargs["json"] = body
        response = client.request(method, path, **kwargs)
        request: dict = {"method": method, "path": path, "role": role}
        if body is not None:
            request["body"] = body
        exchanges.append(
            {"name": name, "request": request, "response": {"status": response.status_code, "body": response.json()}}
        )
        return response.json()

    record("unauth_flights", "GET", "/v1/flights", role="anonymous")
    record("flights", "GET", "/v1/flights")
    record("flights_search", "GET", "/v1/flights?route=DAC-CGP")

    confirmed = record(
        "booking_confirmed",
        "POST",
        "/v1/bookings",
        body={"customer": "cust-ava", "flight": "BG-147", "payment_method": "card"},
    )
    pnr = confirmed["data"]["pnr"]

    record("soldout_fill", "POST", "/v1/bookings", body={"customer": "cust-bo", "flight": "BG-901", "payment_method": "card"})
    record("booking_rejected", "POST", "/v1/bookings", body={"customer": "cust-cy", "flight": "BG-901", "payment_method": "card"})

    pending = record(
        "booking_pending",
        "POST",
        "/v1/bookings",
        body={"customer": "cust-dee", "flight": "BG-147", "payment_method": "mobile"},
    )
    match = re.search(r"booking (\S+) remains Pending", pending["error"]["message"])
    assert match, pending
    record("payment_retry", "POST", "/v1/payments", body={"pnr": match.group(1)})

    record("booking_detail", "GET", f"/v1/bookings/{pnr}")
    record("cancel_refund", "POST", f"/v1/bookings/{pnr}/cancel", body={"reason": "plans changed"})
    record("history_four", "GET", f"/v1/bookings/{pnr}/history")
    record("notifications", "GET", f"/v1/notifications?pnr={pnr}")
    record("unknown_pnr", "GET", "/v1/bookings/PZZZZZ")
    record("verify_ok", "GET", "/v1/chain/verify")
    system.settle_cluster()  # let replication finish so the snapshot is quiescent
    record("admin_nodes_up", "GET", "/v1/admin/nodes", role="admin")
    record("admin_metrics", "GET", "/v1/admin/metrics", role="admin")
    record("admin_forbidden", "GET", "/v1/admin/nodes", role="customer")

    # Doctor one committed payload value in place so verification reports the damage.
    ledger = system.world.ledger
    victim = ledger.blocks[2]
    payload = dict(victim.transactions[0].payload)
    key = next(k for k, v in payload.items() if isinstance(v, int) and not isinstance(v, bool))
    payload[key] = payload[key] + 1
    doctored_tx = dataclasses.replace(victim.transactions[0], payload=payload)
    ledger.blocks[2] = dataclasses.replace(victim, transactions=(doctored_tx,) + victim.transactions[1:])
    record("verify_invalid", "GET", "/v1/chain/verify")

    crash_scenario = parse_scenario(CRASH_SCENARIO)
    crash_system = build_system(crash_scenario)
    run_workload(crash_system, crash_scenario)
    crash_system.settle_cluster()
    crash_client = TestClient(create_app(crash_system))
    response = crash_client.get("/v1/admin/nodes", headers=HEADERS["admin"])
    exchanges.append(
        {
            "name": "admin_nodes_crashed",
            "request": {"method": "GET", "path": "/v1/admin/nodes", "role": "admin"},
            "response": {"status": response.status_code, "body": response.json()},
        }
    )

    OUT.write_text(json.dumps({"exchanges": exchanges}, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT} ({len(exchanges)} exchanges)")


if __name__ == "__main__":
    main()
