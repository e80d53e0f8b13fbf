# app/api/routers/health.py

from typing import Any, Dict

from fastapi import APIRouter, Depends
from sqlalchemy import text
from sqlalchemy.orm import Session

from app.core.config import Settings, get_settings
from app.db import get_db

router = APIRouter(
    prefix="/health",
    tags=["Health"],
)


@router.get(
    "/live",
    summary="Liveness probe",
    response_description="Simple liveness indicator for the API process.",
)
async def liveness() -> Dict[str, bool]:
    """
    Does not touch the database or the filesystem; just indicates the
    process is up.
    """
    return {"ok": True}


@router.get(
    "/ready",
    summary="Readiness probe",
    response_description="Effective settings and a run registry check.",
)
def readiness(
    settings: Settings = Depends(get_settings),
    db: Session = Depends(get_db),
) -> Dict[str, Any]:
    try:
        db.execute(text("SELECT 1"))
        registry: Dict[str, Any] = {"ok": True}
    except Exception as exc:
        registry = {"ok": False, "error": str(exc)}

    return {
        "ok": registry["ok"],
        "registry": registry,
        "settings": {
            "output_dir": settings.output_dir,
            "brute_force_cap": settings.brute_force_cap,
            "workers": settings.workers,
            "significance_level": settings.significance_level,
        },
    }
