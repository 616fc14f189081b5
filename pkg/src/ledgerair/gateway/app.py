"""HTTP gateway over a live reservation system.

Single response envelope everywhere: {"ok": true, "data": ...} or
{"ok": false, "error": {"code": ..., "message": ...}}. Authentication is
a static bearer token per role; the admin token also opens customer
routes. Every successful state change carries resolvable transaction
references (kind, tx_id, height) that GET /v1/chain/verify can back.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..consensus.report import availability_report
from ..contracts.engine import REJECTED_MESSAGE
from ..errors import GatewayTimeout, LedgerAirError, UnknownPnr
from ..services.baseline import divergence_report, ledger_views
from ..services.reservations import ReservationSystem
from .schemas import (
    BOOKING_REQUIRED,
    CANCEL_OPTIONAL,
    CANCEL_REQUIRED,
    PAYMENT_OPTIONAL,
    PAYMENT_REQUIRED,
    REVIEW_REQUIRED,
    ValidationFailure,
    validate_body,
)

ERROR_STATUS = {
    "VALIDATION": 400,
    "UNAUTHENTICATED": 401,
    "UNKNOWN_ROUTE": 404,
    "UNKNOWN_PNR": 404,
    "UNKNOWN_FLIGHT": 404,
    "NOT_CANCELLABLE": 409,
    "CONTRACT_REJECTED": 409,
    "DUPLICATE_TRANSACTION": 409,
    "GATEWAY_TIMEOUT": 503,
    "COMMIT_ABORTED": 503,
}

DEFAULT_CUSTOMER_TOKEN = "customer-dev-token"
DEFAULT_ADMIN_TOKEN = "admin-dev-token"


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int) -> None:
        self.code = code
        self.status = status
        super().__init__(message)


def _envelope_ok(data, status: int = 200) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data}, status_code=status)


def _envelope_error(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(
        {"ok": False, "error": {"code": code, "message": message}}, status_code=status
    )


def _refs(tx_refs) -> list[dict]:
    return [{"kind": kind, "tx_id": tx_id, "height": height} for kind, tx_id, height in tx_refs]


def _reason_text(reasons) -> str:
    return ", ".join(reason for _, reason in reasons)


def create_app(
    system: ReservationSystem,
    customer_token: str | None = None,
    admin_token: str | None = None,
) -> FastAPI:
    customer_token = customer_token or os.environ.get(
        "LEDGERAIR_TOKEN_CUSTOMER", DEFAULT_CUSTOMER_TOKEN
    )
    admin_token = admin_token or os.environ.get("LEDGERAIR_TOKEN_ADMIN", DEFAULT_ADMIN_TOKEN)
    app = FastAPI(title="ledgerair", docs_url=None, redoc_url=None, openapi_url=None)
    # Browser consoles are served from their own origin; auth is bearer-token
    # only (no cookies), so a wildcard origin leaks nothing.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["Authorization", "Content-Type"],
    )

    # -- auth --------------------------------------------------------------

    def role_of(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.startswith("Bearer "):
            raise ApiError("UNAUTHENTICATED", "missing bearer token", 401)
        token = header[len("Bearer ") :]
        if token == admin_token:
            return "admin"
        if token == customer_token:
            return "customer"
        raise ApiError("UNAUTHENTICATED", "unrecognized token", 401)

    def require_admin(request: Request) -> None:
        if role_of(request) != "admin":
            raise ApiError("UNAUTHENTICATED", "admin token required", 401)

    async def json_body(request: Request):
        try:
            return await request.json()
        except Exception:
            raise ApiError("VALIDATION", "request body is not valid JSON", 400) from None

    # -- error rendering ------------------------------------------------------

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return _envelope_error(exc.code, str(exc), exc.status)

    @app.exception_handler(ValidationFailure)
    async def on_validation(request: Request, exc: ValidationFailure) -> JSONResponse:
        return _envelope_error("VALIDATION", str(exc), 400)

    @app.exception_handler(LedgerAirError)
    async def on_domain_error(request: Request, exc: LedgerAirError) -> JSONResponse:
        message = str(exc)
        if isinstance(exc, GatewayTimeout) and exc.pnr:
            message += f"; booking {exc.pnr} remains Pending, retry via POST /v1/payments"
        status = ERROR_STATUS.get(exc.code, 500)
        return _envelope_error(exc.code, message, status)

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        if exc.status_code in (404, 405):
            return _envelope_error("UNKNOWN_ROUTE", f"no such route: {request.url.path}", 404)
        return _envelope_error("VALIDATION", str(exc.detail), exc.status_code)

    # -- result mapping ---------------------------------------------------------

    def booking_payload(result: dict) -> dict:
        return {
            "pnr": result["pnr"],
            "status": result["status"],
            "seat": result.get("seat", ""),
            "fare": result.get("fare"),
            "tx_refs": _refs(result.get("tx_refs", [])),
        }

    def booking_response(result: dict, created: bool) -> JSONResponse:
        status = result["status"]
        if status == "Confirmed":
            return _envelope_ok(booking_payload(result), 201 if created else 200)
        if status == "Pending":
            data = booking_payload(result)
            data["retryable"] = bool(result.get("retryable", True))
            return _envelope_ok(data, 202)
        detail = _reason_text(result.get("reasons", []))
        message = f"{REJECTED_MESSAGE}: {detail}" if detail else REJECTED_MESSAGE
        if result.get("refund_amount"):
            message += f"; captured payment refunded ({result['refund_amount']})"
        raise ApiError("CONTRACT_REJECTED", message, 409)

    # -- customer routes ----------------------------------------------------------

    @app.get("/v1/flights")
    async def list_flights(request: Request):
        role_of(request)
        route = request.query_params.get("route")
        raw_time = request.query_params.get("departure_time")
        departure_time = None
        if raw_time is not None:
            try:
                departure_time = int(raw_time)
            except ValueError:
                raise ApiError("VALIDATION", "departure_time must be an integer", 400) from None
        return _envelope_ok({"flights": system.list_flights(route, departure_time)})

    @app.post("/v1/bookings")
    async def create_booking(request: Request):
        role_of(request)
        body = validate_body(await json_body(request), BOOKING_REQUIRED)
        result = system.initiate_booking(body["customer"], body["flight"], body["payment_method"])
        return booking_response(result, created=True)

    @app.post("/v1/payments")
    async def complete_payment(request: Request):
        role_of(request)
        body = validate_body(await json_body(request), PAYMENT_REQUIRED, PAYMENT_OPTIONAL)
        result = system.complete_payment(body["pnr"], body.get("payment_method"))
        return booking_response(result, created=False)

    @app.get("/v1/bookings/{pnr}")
    async def get_booking(pnr: str, request: Request):
        role_of(request)
        booking = system.get_booking(pnr)
        if booking is None:
            raise UnknownPnr(f"no such booking: {pnr}")
        return _envelope_ok(booking)

    @app.get("/v1/bookings/{pnr}/history")
    async def get_history(pnr: str, request: Request):
        role_of(request)
        if system.get_booking(pnr) is None:
            raise UnknownPnr(f"no such booking: {pnr}")
        return _envelope_ok({"pnr": pnr, "events": system.booking_history(pnr)})

    @app.post("/v1/bookings/{pnr}/cancel")
    async def cancel_booking(pnr: str, request: Request):
        role_of(request)
        body = validate_body(await json_body(request), CANCEL_REQUIRED, CANCEL_OPTIONAL)
        result = system.cancel_booking(pnr, body["reason"], body.get("cancel_time"))
        if "refund_amount" not in result:
            raise ApiError(
                "CONTRACT_REJECTED",
                f"{REJECTED_MESSAGE}: {_reason_text(result.get('reasons', []))}",
                409,
            )
        return _envelope_ok(
            {
                "pnr": pnr,
                "status": result["status"],
                "refund_amount": result["refund_amount"],
                "tx_refs": _refs(result["tx_refs"]),
            }
        )

    @app.post("/v1/reviews")
    async def submit_review(request: Request):
        role_of(request)
        body = validate_body(await json_body(request), REVIEW_REQUIRED)
        result = system.submit_review(body["pnr"], body["rating"], body["text"])
        if result["status"] != "Recorded":
            raise ApiError(
                "CONTRACT_REJECTED",
                f"{REJECTED_MESSAGE}: {_reason_text(result.get('reasons', []))}",
                409,
            )
        return _envelope_ok(
            {
                "pnr": result["pnr"],
                "review_id": result["review_id"],
                "status": "Recorded",
                "verified": result["verified"],
                "tx_refs": _refs(result["tx_refs"]),
            },
            201,
        )

    @app.get("/v1/notifications")
    async def notifications(request: Request):
        role_of(request)
        pnr = request.query_params.get("pnr")
        receipts = system.notifier.for_pnr(pnr) if pnr else list(system.notifier.receipts)
        return _envelope_ok({"receipts": receipts})

    @app.get("/v1/chain/verify")
    async def chain_verify(request: Request):
        role_of(request)
        verdict = system.verify()
        return _envelope_ok(
            {
                "valid": verdict.ok,
                "height": verdict.height if not verdict.ok else system.world.ledger.height,
                "reason": verdict.reason or "",
                "detail": verdict.detail or "",
                "tip_hash": system.world.ledger.tip_hash,
            }
        )

    # -- admin routes ----------------------------------------------------------------

    @app.get("/v1/admin/nodes")
    async def admin_nodes(request: Request):
        require_admin(request)
        world = system.world
        nodes = [
            {
                "node_id": node.node_id,
                "status": node.status,
                "height": node.chain.height,
                "tip_hash": node.chain.tip_hash,
                "up_ticks": node.up_ticks,
            }
            for node in world.nodes.values()
        ]
        return _envelope_ok(
            {
                "nodes": nodes,
                "quorum": world.config.quorum,
                "clock": world.clock,
                "designated_leader": world.designated_leader(),
            }
        )

    @app.get("/v1/admin/audit")
    async def admin_audit(request: Request):
        require_admin(request)
        params = request.query_params
        try:
            limit = int(params.get("limit", "100"))
        except ValueError:
            raise ApiError("VALIDATION", "limit must be an integer", 400) from None
        events = system.audit.events
        filters = {
            "pnr": params.get("pnr"),
            "flight": params.get("flight"),
            "customer": params.get("customer"),
        }
        kind = params.get("kind")
        selected = [
            e
            for e in events
            if (kind is None or e["kind"] == kind)
            and all(v is None or e["payload"].get(k) == v for k, v in filters.items())
        ]
        return _envelope_ok({"total": len(selected), "events": selected[-limit:]})

    @app.get("/v1/admin/metrics")
    async def admin_metrics(request: Request):
        require_admin(request)
        divergence = divergence_report(ledger_views(system))
        status_counts: dict[str, int] = {}
        for record in system.bookings.bookings.values():
            status_counts[record["status"]] = status_counts.get(record["status"], 0) + 1
        return _envelope_ok(
            {
                "availability": availability_report(system.world),
                "money": {
                    "captured_total": sum(system.payments_view.captured_by_pnr.values()),
                    "refunded_total": sum(system.payments_view.refunded_by_pnr.values()),
                    "conserved": system.payments_view.conserved(),
                },
                "divergence": {
                    "mismatches": divergence["mismatches"],
                    "affected_pnrs": len(divergence["affected_pnrs"]),
                },
                "bookings": status_counts,
                "pending": len(system.pending),
                "notifications": system.notifier.count(),
                "safety_violations": len(system.world.safety_violations),
            }
        )

    return app
