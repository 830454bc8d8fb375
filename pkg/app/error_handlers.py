from fastapi import Request
from fastapi.responses import JSONResponse
from fastapi import status
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from app.engines.logging import get_logger
from app.errors import (
    BackfillError,
    BudgetExhaustedError,
    ConfigError,
    HybridViewError,
    InputError,
    LlmTransportError,
    SqlExecutionError,
    ToolCallValidationError,
)

logger = get_logger(__name__)

_STATUS = (
    (SqlExecutionError, status.HTTP_400_BAD_REQUEST),
    (InputError, status.HTTP_400_BAD_REQUEST),
    (ConfigError, status.HTTP_400_BAD_REQUEST),
    (ToolCallValidationError, status.HTTP_422_UNPROCESSABLE_ENTITY),
    (BackfillError, status.HTTP_422_UNPROCESSABLE_ENTITY),
    (BudgetExhaustedError, status.HTTP_429_TOO_MANY_REQUESTS),
    (LlmTransportError, status.HTTP_502_BAD_GATEWAY),
)


def status_for(exc: HybridViewError) -> int:
    for error_type, code in _STATUS:
        if isinstance(exc, error_type):
            return code
    return status.HTTP_400_BAD_REQUEST


def register_error_handlers(app):
    @app.exception_handler(SqlExecutionError)
    async def sql_error_handler(request: Request, exc: SqlExecutionError):
        return JSONResponse(
            status_code=status.HTTP_400_BAD_REQUEST,
            content={"detail": exc.message, "position": exc.position}
        )

    @app.exception_handler(HybridViewError)
    async def hybrid_view_error_handler(request: Request, exc: HybridViewError):
        code = status_for(exc)
        logger.info(f"{type(exc).__name__} on {request.url.path}: {exc}")
        return JSONResponse(
            status_code=code,
            content={"detail": str(exc)}
        )

    @app.exception_handler(ValueError)
    async def value_error_exception_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=status.HTTP_400_BAD_REQUEST,
            content={"detail": str(exc)}
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        # Handles HTTPException, including 404
        return JSONResponse(
            status_code=exc.status_code,
            content={"detail": exc.detail if exc.detail else "Not found"}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            content={"detail": exc.errors()}
        )

    @app.exception_handler(Exception)
    async def generic_exception_handler(request: Request, exc: Exception):
        logger.error(f"Unhandled error on {request.url.path}", exc_info=exc)
        return JSONResponse(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            content={"detail": "Internal server error"}
        )
