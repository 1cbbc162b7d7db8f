"""
Scenario upload endpoint with validation and session management
"""
import logging
import shutil
import uuid
from pathlib import Path
from typing import List

import aiofiles
from fastapi import APIRouter, File, HTTPException, UploadFile

from botlc.config import settings
from botlc.exceptions import ScenarioError
from botlc.models.schemas import ScenarioSummary, UploadResponse
from botlc.utils.scenario_io import load_scenario

logger = logging.getLogger(__name__)

router = APIRouter()

# In-memory session storage; sessions do not survive a restart
active_sessions = {}


@router.post("/", response_model=UploadResponse)
async def upload_scenarios(files: List[UploadFile] = File(...)):
    """
    Upload scenario files (.toml) for a batch run

    Returns session_id to start and track the run
    """
    if not files:
        raise HTTPException(status_code=400, detail="No files provided")

    session_id = str(uuid.uuid4())
    session_dir = settings.UPLOAD_DIR / session_id
    session_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"📤 Upload started - Session: {session_id}")

    summaries: List[ScenarioSummary] = []
    paths: List[str] = []
    names = set()
    try:
        for file in files:
            filename = Path(file.filename or "").name
            if Path(filename).suffix.lower() != ".toml":
                logger.warning(f"⚠️  Skipping {filename} (not a .toml scenario)")
                continue

            if any(s.filename == filename for s in summaries):
                raise HTTPException(status_code=422, detail=f"Duplicate file name '{filename}'")

            content = await file.read()
            if len(content) > settings.MAX_UPLOAD_KB * 1024:
                raise HTTPException(
                    status_code=413,
                    detail=f"File {filename} exceeds {settings.MAX_UPLOAD_KB} KB limit",
                )

            file_path = session_dir / filename
            async with aiofiles.open(file_path, "wb") as f:
                await f.write(content)

            try:
                scenario = load_scenario(file_path)
            except ScenarioError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            if scenario.name in names:
                raise HTTPException(status_code=422, detail=f"Duplicate scenario name '{scenario.name}'")
            names.add(scenario.name)

            summaries.append(ScenarioSummary(
                filename=filename,
                name=scenario.name,
                method=scenario.method,
                t_end_s=scenario.integrator.t_end,
                dt_s=scenario.integrator.dt,
            ))
            paths.append(str(file_path))
            logger.info(f"  ✅ {filename} ({scenario.name}, {scenario.method})")
    except HTTPException:
        shutil.rmtree(session_dir, ignore_errors=True)
        raise

    if not summaries:
        shutil.rmtree(session_dir, ignore_errors=True)
        raise HTTPException(status_code=400, detail="No valid scenario files uploaded")

    active_sessions[session_id] = {
        "session_dir": str(session_dir),
        "scenario_paths": paths,
        "scenarios": [s.model_dump() for s in summaries],
        "status": "uploaded",
    }
    logger.info(f"✅ Upload complete - {len(summaries)} scenario(s)")

    return UploadResponse(session_id=session_id, scenarios_uploaded=len(summaries), scenarios=summaries)


@router.get("/session/{session_id}")
async def get_session_info(session_id: str):
    """Get information about an upload session"""
    if session_id not in active_sessions:
        raise HTTPException(status_code=404, detail="Session not found")
    return active_sessions[session_id]


@router.delete("/session/{session_id}")
async def delete_session(session_id: str):
    """Remove a session, its uploads and its outputs"""
    if session_id not in active_sessions:
        raise HTTPException(status_code=404, detail="Session not found")

    session_info = active_sessions.pop(session_id)
    shutil.rmtree(session_info["session_dir"], ignore_errors=True)
    shutil.rmtree(settings.OUT / session_id, ignore_errors=True)

    logger.info(f"🗑️  Session {session_id} cleaned up")
    return {"message": "Session deleted successfully"}
