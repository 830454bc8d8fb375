from fastapi import APIRouter, Depends

from app.config import Settings, get_settings
from app.schemas.v1.api import BackfillRequest, BackfillResponse
from app.services.view_services import ViewService

router = APIRouter(prefix="/backfill", tags=["backfill"])


@router.post("", response_model=BackfillResponse)
def backfill(request: BackfillRequest, settings: Settings = Depends(get_settings)):
    """
    Apply a BackfillData call to a template using the datastore built from the input.
    - **Request body:** BackfillRequest schema (JSON)
    - **Returns:** The template with every mapped list rebuilt from SQL results
    - **Errors:** 400 Bad Request for SQL errors, 422 for invalid calls or unresolvable paths
    """
    return ViewService(settings).backfill(request)
