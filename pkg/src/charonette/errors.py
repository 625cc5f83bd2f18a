"""Shared exception hierarchy.

Every concrete error class carries a stable machine-readable ``code`` and the
HTTP status the API layer maps it to, so one module error always surfaces as
exactly one transport code.
"""

from __future__ import annotations


class CharonetteError(Exception):
    code = "error"
    status = 400

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class NotFoundError(CharonetteError):
    code = "not_found"
    status = 404


class ConflictError(CharonetteError):
    """Optimistic-concurrency failure: the caller's revision is stale."""

    code = "revision_conflict"
    status = 409
