"""HTTP surface for the reservation system."""

from .app import DEFAULT_ADMIN_TOKEN, DEFAULT_CUSTOMER_TOKEN, ERROR_STATUS, ApiError, create_app
from .schemas import ValidationFailure, validate_body

__all__ = [
    "ApiError",
    "DEFAULT_ADMIN_TOKEN",
    "DEFAULT_CUSTOMER_TOKEN",
    "ERROR_STATUS",
    "ValidationFailure",
    "create_app",
    "validate_body",
]
