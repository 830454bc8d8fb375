from fastapi import APIRouter, Depends

from app.config import Settings, get_settings
from app.schemas.v1.api import TransformRequest, TransformResponse
from app.services.view_services import ViewService

router = APIRouter(prefix="/transform", tags=["transform"])


@router.post("", response_model=TransformResponse)
def transform(request: TransformRequest, settings: Settings = Depends(get_settings)):
    """
    Turn raw mixed text/JSON into a hybrid-view prompt.
    - **Request body:** TransformRequest schema (JSON)
    - **Returns:** The prompt, the tool selection block when truncated, and token statistics
    - **Errors:** 400 Bad Request for invalid truncation settings
    """
    return ViewService(settings).transform(request)
