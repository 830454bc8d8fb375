"""
Exception hierarchy shared by the library, the HTTP layer and the CLI.
"""
from typing import Any, Optional


class HybridViewError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HybridViewError):
    """Invalid or incomplete configuration (bad knob values, missing credentials)."""


class InputError(HybridViewError):
    """The raw input could not be read or decoded."""


class DatastoreError(HybridViewError):
    """Failure inside the request-scoped datastore."""


class SqlExecutionError(DatastoreError):
    """A query was rejected or failed in the engine."""

    def __init__(self, message: str, position: Optional[int] = None, query: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.position = position
        self.query = query

    def to_dict(self) -> dict:
        return {"message": self.message, "position": self.position}


class AnomalyInputError(DatastoreError):
    """The analytical operators need an existing numeric column with at least two rows."""


class BackfillError(HybridViewError):
    """Template backfill could not be applied."""


class BackfillPathError(BackfillError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"cannot resolve template path '{path}': {reason}")
        self.path = path
        self.reason = reason


class MissingColumnError(BackfillError):
    def __init__(self, column: str, available: list[str]):
        super().__init__(
            f"mapping column '{column}' is not in the query result (columns: {', '.join(available) or 'none'})"
        )
        self.column = column
        self.available = available


class ToolCallValidationError(HybridViewError):
    """The model emitted a tool call that does not match the contract."""


class BudgetExhaustedError(HybridViewError):
    def __init__(self, message: str = "invocation budget exhausted"):
        super().__init__(message)


class LlmTransportError(HybridViewError):
    """The LLM endpoint failed; `partial` carries whatever the request produced so far."""

    def __init__(self, message: str, status: Optional[int] = None, partial: Any = None):
        super().__init__(message)
        self.status = status
        self.partial = partial
