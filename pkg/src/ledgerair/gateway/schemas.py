"""Request body validation for the HTTP gateway.

Validation failures list every problem at once so a client can fix a
request in one round trip.
"""

from __future__ import annotations


class ValidationFailure(Exception):
    def __init__(self, problems: list[str]) -> None:
        self.problems = problems
        super().__init__("; ".join(problems))


def _type_ok(value, typ: type) -> bool:
    if typ is int and isinstance(value, bool):
        return False
    return isinstance(value, typ)


def validate_body(
    doc, required: dict[str, type], optional: dict[str, type] | None = None
) -> dict:
    if not isinstance(doc, dict):
        raise ValidationFailure(["body must be a JSON object"])
    optional = optional or {}
    problems: list[str] = []
    clean: dict = {}
    for name, typ in required.items():
        if name not in doc:
            problems.append(f"missing field {name!r}")
        elif not _type_ok(doc[name], typ):
            problems.append(f"field {name!r} must be {typ.__name__}")
        else:
            clean[name] = doc[name]
    for name, typ in optional.items():
        if name not in doc or doc[name] is None:
            continue
        if not _type_ok(doc[name], typ):
            problems.append(f"field {name!r} must be {typ.__name__}")
        else:
            clean[name] = doc[name]
    unknown = sorted(set(doc) - set(required) - set(optional))
    if unknown:
        problems.append(f"unknown fields: {', '.join(unknown)}")
    if problems:
        raise ValidationFailure(problems)
    return clean


BOOKING_REQUIRED = {"customer": str, "flight": str, "payment_method": str}
PAYMENT_REQUIRED = {"pnr": str}
PAYMENT_OPTIONAL = {"payment_method": str}
CANCEL_REQUIRED = {"reason": str}
CANCEL_OPTIONAL = {"cancel_time": int}
REVIEW_REQUIRED = {"pnr": str, "rating": int, "text": str}
