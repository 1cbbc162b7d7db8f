"""
Batch run endpoints: start, progress and results
"""
import logging
from pathlib import Path

from fastapi import APIRouter, BackgroundTasks, HTTPException

from botlc.config import settings
from botlc.models.schemas import RunProgress, RunRequest, RunResult, RunState, ScenarioOutcome
from botlc.services.task_scheduler import RunScheduler, RunTask
from botlc.utils.scenario_io import load_scenario

logger = logging.getLogger(__name__)

router = APIRouter()

# Track run tasks per session
run_tasks = {}


@router.post("/", response_model=RunProgress)
async def start_run(request: RunRequest, background_tasks: BackgroundTasks):
    """
    Start running every scenario of an upload session
    Returns immediately; the simulations run in the background
    """
    from botlc.routes.scenarios import active_sessions

    if request.session_id not in active_sessions:
        raise HTTPException(status_code=404, detail="Session not found. Please upload scenarios first.")

    task = run_tasks.get(request.session_id)
    if task and task["status"] in (RunState.PENDING, RunState.RUNNING):
        raise HTTPException(status_code=409, detail="A run is already in progress for this session")

    total = len(active_sessions[request.session_id]["scenario_paths"])
    run_tasks[request.session_id] = {
        "status": RunState.PENDING,
        "progress": 0,
        "message": "Queued",
        "scenarios_done": 0,
        "total_scenarios": total,
    }
    background_tasks.add_task(_run_background, request.session_id, frozenset(request.emit))

    logger.info(f"🚀 Run started for session: {request.session_id}")
    return _progress(request.session_id)


@router.get("/status/{session_id}", response_model=RunProgress)
async def get_run_status(session_id: str):
    if session_id not in run_tasks:
        raise HTTPException(status_code=404, detail="Run not found")
    return _progress(session_id)


@router.get("/result/{session_id}", response_model=RunResult)
async def get_run_result(session_id: str):
    """Per-scenario exit codes, failed checks and download links"""
    if session_id not in run_tasks:
        raise HTTPException(status_code=404, detail="Run not found")

    task = run_tasks[session_id]
    if task["status"] not in (RunState.COMPLETED, RunState.FAILED):
        raise HTTPException(status_code=409, detail=f"Run not complete. Current status: {task['status'].value}")

    return RunResult(
        session_id=session_id,
        status=task["status"],
        outcomes=task.get("outcomes", []),
        download_urls=task.get("download_urls", []),
    )


def _progress(session_id: str) -> RunProgress:
    task = run_tasks[session_id]
    return RunProgress(
        session_id=session_id,
        status=task["status"],
        progress=task["progress"],
        message=task["message"],
        scenarios_done=task["scenarios_done"],
        total_scenarios=task["total_scenarios"],
    )


async def _run_background(session_id: str, emit: frozenset):
    """Background task; updates progress in run_tasks"""
    from botlc.routes.scenarios import active_sessions

    task = run_tasks[session_id]
    try:
        paths = active_sessions[session_id]["scenario_paths"]
        output_dir = settings.OUT / session_id
        tasks = []
        for path in paths:
            scenario = load_scenario(Path(path))
            tasks.append(RunTask(scenario, output_dir / scenario.name, emit))

        def on_progress(done: int, total: int) -> None:
            task.update({
                "scenarios_done": done,
                "progress": int(100 * done / total),
                "message": f"{done}/{total} scenario(s) finished",
            })

        task.update({"status": RunState.RUNNING, "message": f"Running {len(tasks)} scenario(s)"})
        outcomes = await RunScheduler(settings.PARALLELISM, progress=on_progress).schedule_and_execute(tasks)

        results, urls = [], []
        for outcome in outcomes:
            name = outcome.scenario.name
            files = [p.relative_to(output_dir / name).as_posix() for p in outcome.files]
            results.append(ScenarioOutcome(
                name=name,
                exit_code=outcome.exit_code,
                aborted=outcome.trajectory.aborted,
                failed_checks=outcome.report.failed,
                files=files,
            ))
            urls.extend(f"/api/download/{session_id}/{name}/{f}" for f in files)

        task.update({
            "status": RunState.COMPLETED,
            "progress": 100,
            "message": f"Finished {len(outcomes)} scenario(s)",
            "outcomes": results,
            "download_urls": urls,
        })
        logger.info(f"✅ Run complete for {session_id}")

    except Exception as e:
        logger.exception(f"❌ Run failed for {session_id}: {e}")
        task.update({"status": RunState.FAILED, "progress": 0, "message": f"Run failed: {e}"})
