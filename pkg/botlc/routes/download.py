"""
Artifact download endpoints
"""
import zipfile
from io import BytesIO
from pathlib import Path

from fastapi import APIRouter, HTTPException
from fastapi.responses import FileResponse, StreamingResponse

from botlc.config import settings

router = APIRouter()

MEDIA_TYPES = {
    ".csv": "text/csv",
    ".svg": "image/svg+xml",
    ".txt": "text/plain",
    ".kv": "text/plain",
    ".json": "application/json",
}


def _session_dir(session_id: str) -> Path:
    output_dir = (settings.OUT / session_id).resolve()
    if output_dir.parent != settings.OUT.resolve() or not output_dir.is_dir():
        raise HTTPException(status_code=404, detail="Session output not found")
    return output_dir


@router.get("/{session_id}/{scenario}/{filename:path}")
async def download_file(session_id: str, scenario: str, filename: str):
    """Download one artifact of one scenario"""
    output_dir = _session_dir(session_id)
    file_path = (output_dir / scenario / filename).resolve()
    if output_dir not in file_path.parents or not file_path.is_file():
        raise HTTPException(status_code=404, detail="File not found")

    return FileResponse(
        path=str(file_path),
        filename=file_path.name,
        media_type=MEDIA_TYPES.get(file_path.suffix, "application/octet-stream"),
    )


@router.get("/zip/{session_id}")
async def download_all_as_zip(session_id: str):
    """Download every artifact of a session as ZIP"""
    output_dir = _session_dir(session_id)

    zip_buffer = BytesIO()
    with zipfile.ZipFile(zip_buffer, "w", zipfile.ZIP_DEFLATED) as zip_file:
        for file_path in sorted(output_dir.rglob("*")):
            if file_path.is_file():
                zip_file.write(file_path, arcname=file_path.relative_to(output_dir).as_posix())

    zip_buffer.seek(0)
    return StreamingResponse(
        zip_buffer,
        media_type="application/zip",
        headers={"Content-Disposition": f"attachment; filename=botlc_{session_id}.zip"},
    )
