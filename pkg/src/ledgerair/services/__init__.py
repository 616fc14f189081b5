"""Service layer: projections, payments, notifications, orchestration."""

from .baseline import BaselineSystem, divergence_report, ledger_views
from .notifications import NotificationLog
from .payments import PaymentGateway
from .projections import (
    PROJECTION_FACTORIES,
    AuditProjection,
    BookingProjection,
    CustomerProfileProjection,
    InventoryProjection,
    PaymentProjection,
    Projection,
    ReviewProjection,
    apply_block,
    rebuild_projection,
)
from .reservations import SERVICE_IDENTITIES, ReservationSystem, SystemView, base36

__all__ = [
    "AuditProjection",
    "BaselineSystem",
    "BookingProjection",
    "CustomerProfileProjection",
    "InventoryProjection",
    "NotificationLog",
    "PROJECTION_FACTORIES",
    "PaymentGateway",
    "PaymentProjection",
    "Projection",
    "ReservationSystem",
    "ReviewProjection",
    "SERVICE_IDENTITIES",
    "SystemView",
    "apply_block",
    "base36",
    "divergence_report",
    "ledger_views",
    "rebuild_projection",
]
