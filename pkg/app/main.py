# app/main.py

from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.api.routers.experiments import router as experiments_router
from app.api.routers.health import router as health_router
from app.api.routers.problems import router as problems_router
from app.api.routers.reports import router as reports_router
from app.core.config import get_settings
from app.core.logging import configure_logging
from app.db import init_db


@asynccontextmanager
async def lifespan(_: FastAPI):
    init_db()
    yield


def create_app() -> FastAPI:
    """
    Application factory for the neuroevolution experiment API.
    """
    configure_logging(get_settings().log_level)
    app = FastAPI(
        title="Neuroevo API",
        description="Symmetry-breaking neuroevolution experiments: problems, runs and statistical reports.",
        version="0.1.0",
        lifespan=lifespan,
    )

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    app.include_router(health_router)
    app.include_router(problems_router)
    app.include_router(experiments_router)
    app.include_router(reports_router)

    @app.get("/", tags=["Meta"])
    async def root():
        return {
            "status": "ok",
            "service": "Neuroevo API",
            "version": app.version,
        }

    return app


# FastAPI entrypoint for ASGI servers (uvicorn, gunicorn, etc.)
app = create_app()
