"""Exception types shared across the ledgerair packages."""

from __future__ import annotations


class LedgerAirError(Exception):
    """Base class for all ledgerair errors."""

    code = "INTERNAL"


class DecodeError(LedgerAirError):
    """Canonical bytes could not be decoded back into a record."""

    code = "DECODE"


class InvalidHash(LedgerAirError):
    """A hash field is malformed (not '0' and not 64 lowercase hex chars)."""

    code = "INVALID_HASH"


class DuplicateTransaction(LedgerAirError):
    """Transaction id already present in the pool or committed history."""

    code = "DUPLICATE_TRANSACTION"


class BadSignature(LedgerAirError):
    """Signature does not verify against the registered public key."""

    code = "BAD_SIGNATURE"


class EmptyPool(LedgerAirError):
    """Seal requested while the pending pool is empty."""

    code = "EMPTY_POOL"


class CorruptLog(LedgerAirError):
    """Block log file is truncated or its framing is garbled."""

    code = "CORRUPT_LOG"

    def __init__(self, offset: int, detail: str = "") -> None:
        self.offset = offset
        self.detail = detail
        super().__init__(f"corrupt block log at byte {offset}: {detail or 'bad framing'}")


class NotLeader(LedgerAirError):
    code = "NOT_LEADER"


class LeaderCrashed(LedgerAirError):
    code = "LEADER_CRASHED"


class UnknownNode(LedgerAirError):
    code = "UNKNOWN_NODE"


class MixedBlockHash(LedgerAirError):
    """Votes for one height reference more than one block hash."""

    code = "MIXED_BLOCK_HASH"


class UnknownSpec(LedgerAirError):
    code = "UNKNOWN_SPEC"


class SchemaViolation(LedgerAirError):
    code = "SCHEMA_VIOLATION"

    def __init__(self, field: str, detail: str = "") -> None:
        self.field = field
        self.detail = detail
        super().__init__(f"schema violation on field {field!r}: {detail or 'missing or wrong type'}")


class NotValidated(LedgerAirError):
    """Contract executed out of order (instance not in Validated state)."""

    code = "NOT_VALIDATED"


class CommitAborted(LedgerAirError):
    code = "COMMIT_ABORTED"

    def __init__(self, height: int, detail: str = "") -> None:
        self.height = height
        super().__init__(f"commit aborted at height {height}: {detail}")


class InvalidPolicy(LedgerAirError):
    code = "INVALID_POLICY"


class GatewayTimeout(LedgerAirError):
    """Simulated payment gateway timed out; the capture may be retried."""

    code = "GATEWAY_TIMEOUT"

    def __init__(self, payment_id: str, pnr: str = "") -> None:
        self.payment_id = payment_id
        self.pnr = pnr
        super().__init__(f"payment gateway timeout for {payment_id}")


class NotCancellable(LedgerAirError):
    code = "NOT_CANCELLABLE"

    def __init__(self, status: str) -> None:
        self.status = status
        super().__init__(f"booking is not cancellable in status {status}")


class UnknownPnr(LedgerAirError):
    code = "UNKNOWN_PNR"


class UnknownFlight(LedgerAirError):
    code = "UNKNOWN_FLIGHT"


class OutOfOrder(LedgerAirError):
    """Ledger event applied to a projection out of stream order."""

    code = "OUT_OF_ORDER"

    def __init__(self, expected: tuple[int, int], got: tuple[int, int]) -> None:
        self.expected = expected
        self.got = got
        super().__init__(f"expected event at {expected}, got {got}")


class RejectedByContract(LedgerAirError):
    code = "CONTRACT_REJECTED"

    def __init__(self, reasons: list[str]) -> None:
        self.reasons = reasons
        super().__init__("rejected by contract: " + ", ".join(reasons))


class ScenarioParseError(LedgerAirError):
    code = "SCENARIO_PARSE"


class InvariantViolation(LedgerAirError):
    code = "INVARIANT_VIOLATION"

    def __init__(self, name: str, detail: str = "") -> None:
        self.name = name
        super().__init__(f"invariant violated: {name}" + (f" ({detail})" if detail else ""))


class OffsetOutOfRange(LedgerAirError):
    code = "OFFSET_OUT_OF_RANGE"
