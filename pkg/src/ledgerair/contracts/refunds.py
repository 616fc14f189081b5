"""Refund arithmetic: window gate plus proportional fee, integer minor units."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

from ..errors import InvalidPolicy


def evaluate_refund(
    fare: int,
    policy: dict,
    cancel_time: int,
    departure_time: int,
) -> int:
    """Refund fare x (1 - fee_fraction) when cancelled at least window_hours
    before departure, else 0. Times are logical ticks (one tick per hour).
    """
    try:
        window_hours = policy["window_hours"]
        fee_fraction = policy["fee_fraction"]
    except (KeyError, TypeError) as exc:
        raise InvalidPolicy(f"policy missing field: {exc}") from exc
    if not isinstance(window_hours, int) or window_hours < 0:
        raise InvalidPolicy(f"window_hours must be a non-negative integer, got {window_hours!r}")
    if not isinstance(fee_fraction, (int, float)) or not 0 <= fee_fraction <= 1:
        raise InvalidPolicy(f"fee_fraction must be within [0, 1], got {fee_fraction!r}")
    if fare < 0:
        raise InvalidPolicy(f"fare must be non-negative, got {fare}")
    if cancel_time > departure_time:
        raise InvalidPolicy("cancel_time is after departure_time")
    if departure_time - cancel_time < window_hours:
        return 0
    fraction = Decimal(1) - Decimal(str(fee_fraction))
    amount = (Decimal(fare) * fraction).quantize(Decimal(1), rounding=ROUND_HALF_UP)
    return int(amount)
