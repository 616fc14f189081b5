"""In-process notification outbox.

Collects every user and party notification emitted during contract
settlement so tests and the API can assert on exactly what was sent.
"""

from __future__ import annotations


class NotificationLog:
    def __init__(self) -> None:
        self.receipts: list[dict] = []

    def _record(self, receipt: dict) -> dict:
        receipt["seq"] = len(self.receipts) + 1
        self.receipts.append(receipt)
        return receipt

    def notify_user(self, pnr: str, message: str, detail: str = "") -> dict:
        return self._record(
            {"channel": "user", "pnr": pnr, "message": message, "detail": detail}
        )

    def notify_parties(self, parties: list[str], event: str) -> dict:
        return self._record({"channel": "parties", "parties": list(parties), "event": event})

    def for_pnr(self, pnr: str) -> list[dict]:
        return [r for r in self.receipts if r.get("pnr") == pnr]

    def count(self) -> int:
        return len(self.receipts)
