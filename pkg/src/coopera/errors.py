"""Engine error hierarchy shared by the pipeline, store, service, and CLI."""

from __future__ import annotations

from typing import Any


class CooperaError(Exception):
    """Base class; every engine error carries a machine-readable code."""

    code = "INTERNAL"

    def __init__(self, message: str, *, code: str | None = None, details: Any = None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.details = details

    @property
    def message(self) -> str:
        return str(self)

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details or {}}


class ValidationError(CooperaError):
    """Payload or project content violates a model invariant."""

    code = "VALIDATION"

    def __init__(self, message: str, *, code: str | None = None, violations=None):
        super().__init__(message, code=code, details=[v.to_dict() for v in violations] if violations else None)
        self.violations = list(violations or [])


class StageOrderError(CooperaError):
    """An operation on stage k was attempted before stages 0..k-1 were confirmed."""

    code = "STAGE_ORDER"


class ConflictError(CooperaError):
    """Optimistic-concurrency failure: expected revision no longer current."""

    code = "REVISION_CONFLICT"


class NotFoundError(CooperaError):
    code = "NOT_FOUND"


class ProviderError(CooperaError):
    """Transport-level completion failure. ``kind`` is one of
    ``timeout``, ``auth``, ``rate_limit``, ``transport``."""

    code = "PROVIDER"

    KINDS = ("timeout", "auth", "rate_limit", "transport")

    def __init__(self, message: str, *, kind: str = "transport"):
        if kind not in self.KINDS:
            raise ValueError(f"unknown provider error kind: {kind}")
        super().__init__(message, details={"kind": kind})
        self.kind = kind


class SchemaError(CooperaError):
    """Provider output could not be turned into valid elements after retries.

    Carries the last raw provider text for debugging.
    """

    code = "SCHEMA_INVALID"

    def __init__(self, message: str, *, code: str | None = None, raw_text: str = "", diagnostics=None):
        super().__init__(message, code=code, details={"diagnostics": [d.to_dict() for d in diagnostics or []]})
        self.raw_text = raw_text
        self.diagnostics = list(diagnostics or [])


class StorageError(CooperaError):
    code = "STORAGE"


class CascadeError(CooperaError):
    """A cascade failed mid-run. ``project`` holds the last good state
    (completed stages are kept, not rolled back)."""

    code = "CASCADE"

    def __init__(self, message: str, *, failed_stage, cause: CooperaError, project):
        details = {"failed_stage": failed_stage.key, "cause": cause.to_dict()}
        super().__init__(message, code=cause.code, details=details)
        self.failed_stage = failed_stage
        self.cause = cause
        self.project = project
