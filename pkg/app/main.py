from fastapi import FastAPI
from dotenv import load_dotenv
import os
from app.api import router
from app.config import get_settings
from app.engines.logging import setup_logging, get_logger
from app.error_handlers import register_error_handlers
from contextlib import asynccontextmanager

# Load environment variables
load_dotenv()

# Setup logging
settings = get_settings()
setup_logging(
    level=settings.log_level,
    log_file=settings.log_file
)
logger = get_logger(__name__)

@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(
        "Starting hybrid view service",
        extra={"extra_data": {"render_format": settings.render_format.value, **settings.truncation().model_dump()}},
    )
    try:
        yield
    finally:
        logger.info("Shutting down hybrid view service")

app = FastAPI(
    title="Hybrid View API",
    description="Turns mixed text/JSON inputs into compact hybrid-view prompts backed by a request-scoped SQL datastore",
    version="1.0.0",
    openapi_tags=[
        {"name": "transform", "description": "Build hybrid-view prompts"},
        {"name": "query", "description": "Run SQL over an input's datastore"},
        {"name": "backfill", "description": "Fill LLM templates from an input's datastore"},
    ],
    lifespan=lifespan,
)

register_error_handlers(app)

# Include the API router
app.include_router(router)

@app.get("/")
async def root():
    logger.debug("Health check endpoint called")
    return {"message": "Hybrid View API is running"}

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host=os.getenv("HOST", "0.0.0.0"),
        port=int(os.getenv("PORT", 8000)),
        reload=True
    )
