"""
FastAPI application entry point
"""
import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from botlc import __version__
from botlc.config import settings
from botlc.methods import METHODS
from botlc.routes import download, runs, scenarios

logger = logging.getLogger(__name__)

app = FastAPI(
    title="BoTLC Simulation Service",
    description="Run bearing-only localization and circumnavigation scenarios as batch jobs",
    version=__version__,
    docs_url="/api/docs",
    redoc_url="/api/redoc",
    openapi_url="/api/openapi.json",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(scenarios.router, prefix="/api/scenarios", tags=["Scenarios"])
app.include_router(runs.router, prefix="/api/runs", tags=["Runs"])
app.include_router(download.router, prefix="/api/download", tags=["Download"])


@app.get("/")
async def root():
    return {
        "message": "BoTLC Simulation Service",
        "version": __version__,
        "endpoints": {
            "swagger_ui": "/api/docs",
            "redoc": "/api/redoc",
            "openapi_schema": "/api/openapi.json",
            "health": "/health",
        },
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "version": __version__,
        "methods": sorted(METHODS),
        "parallelism": settings.PARALLELISM,
    }


if __name__ == "__main__":
    import uvicorn

    logger.info(f"🚀 Serving on http://{settings.HOST}:{settings.PORT} (docs at /api/docs)")
    uvicorn.run("botlc.main:app", host=settings.HOST, port=settings.PORT, reload=settings.DEBUG)
