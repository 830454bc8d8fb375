from fastapi import APIRouter, Depends

from app.config import Settings, get_settings
from app.schemas.v1.api import QueryRequest, QueryResponse
from app.services.view_services import ViewService

router = APIRouter(prefix="/query", tags=["query"])


@router.post("", response_model=QueryResponse)
def query(request: QueryRequest, settings: Settings = Depends(get_settings)):
    """
    Build the datastore for one input and run read-only SQL over it.
    - **Request body:** QueryRequest schema (JSON)
    - **Returns:** Result columns and rows in query order
    - **Errors:** 400 Bad Request with `position` when the query fails
    """
    return ViewService(settings).query(request)
