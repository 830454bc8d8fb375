from fastapi import APIRouter
from app.api.v1 import backfill, query, transform

# Create the v1 router
router = APIRouter(prefix="/v1")

# Include all route modules
router.include_router(transform.router)
router.include_router(query.router)
router.include_router(backfill.router)
