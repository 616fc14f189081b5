"""Simulated card-payment gateway.

Outcomes are scripted so every run is reproducible: the gateway pops the
next outcome from its script per capture attempt and falls back to "ok"
once the script is exhausted. Captures are idempotent by payment id; a
repeat attempt for an already-captured payment returns the original
outcome without consuming script entries.
"""

from __future__ import annotations

from ..errors import GatewayTimeout

OK = "ok"
DECLINE = "decline"
TIMEOUT = "timeout"
OUTCOMES = (OK, DECLINE, TIMEOUT)


class PaymentGateway:
    def __init__(self, script: list[str] | None = None) -> None:
        script = list(script or [])
        for outcome in script:
            if outcome not in OUTCOMES:
                raise ValueError(f"unknown gateway outcome: {outcome!r}")
        self._script = script
        self._cursor = 0
        self._captured: dict[str, dict] = {}
        self.attempts: list[dict] = []

    def _next_outcome(self) -> str:
        if self._cursor < len(self._script):
            outcome = self._script[self._cursor]
            self._cursor += 1
            return outcome
        return OK

    def capture(self, payment_id: str, pnr: str, amount: int, method: str) -> dict:
        """Attempt a capture; raises GatewayTimeout on a scripted timeout.

        Timeouts leave no capture behind, so a retry with the same
        payment_id consumes the next scripted outcome.
        """
        existing = self._captured.get(payment_id)
        if existing is not None:
            return dict(existing)
        outcome = self._next_outcome()
        self.attempts.append(
            {"payment_id": payment_id, "pnr": pnr, "amount": amount, "outcome": outcome}
        )
        if outcome == TIMEOUT:
            raise GatewayTimeout(payment_id, pnr)
        record = {
            "payment_id": payment_id,
            "pnr": pnr,
            "amount": amount,
            "method": method,
            "captured": outcome == OK,
        }
        if outcome == OK:
            self._captured[payment_id] = record
        return dict(record)

    def is_captured(self, payment_id: str) -> bool:
        return payment_id in self._captured
