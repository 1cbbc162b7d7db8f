"""
Batch scheduler: runs independent scenarios with bounded parallelism
"""
import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, FrozenSet, List, Optional

from botlc.models.schemas import EmitKind, Scenario
from botlc.models.state import Trajectory
from botlc.services import simengine
from botlc.services.analysis import InvariantReport, invariant_report
from botlc.utils.writers import write_run_artifacts

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3


@dataclass
class RunTask:
    """One scenario and the directory its artifacts go to"""
    scenario: Scenario
    out_dir: Path
    emit: FrozenSet[EmitKind] = frozenset(EmitKind)


@dataclass
class RunOutcome:
    scenario: Scenario
    trajectory: Trajectory
    report: InvariantReport
    files: List[Path] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.trajectory.aborted:
            return EXIT_ABORT
        return EXIT_OK if self.report.passed else EXIT_INVARIANT


def execute_task(task: RunTask) -> RunOutcome:
    """Simulate, analyse and write one scenario (runs in a worker)"""
    trajectory = simengine.run(task.scenario)
    report = invariant_report(trajectory)
    files = write_run_artifacts(task.out_dir, trajectory, report, task.emit)
    return RunOutcome(scenario=task.scenario, trajectory=trajectory, report=report, files=files)


class RunScheduler:
    """
    Fans scenarios out to workers and collects outcomes in task order.

    With max_parallel == 1 tasks run one after another on a worker thread;
    above that a process pool is used, since the simulation is CPU-bound.
    Parallelism never changes results, only wall-clock time.
    """

    def __init__(
        self,
        max_parallel: int = 1,
        progress: Optional[Callable[[int, int], None]] = None,
    ):
        self.max_parallel = max(1, max_parallel)
        self.progress = progress
        self.semaphore: Optional[asyncio.Semaphore] = None
        self.completed = 0

    async def _execute(self, task: RunTask, executor: Optional[Executor], total: int) -> RunOutcome:
        async with self.semaphore:
            name = task.scenario.name
            logger.info(f"🔄 Starting: {name}")
            loop = asyncio.get_running_loop()
            outcome = await loop.run_in_executor(executor, execute_task, task)
            self.completed += 1
            marker = "✅" if outcome.exit_code == EXIT_OK else "❌"
            logger.info(f"{marker} Finished: {name} (exit {outcome.exit_code}) [{self.completed}/{total}]")
            if self.progress is not None:
                self.progress(self.completed, total)
            return outcome

    async def schedule_and_execute(self, tasks: List[RunTask]) -> List[RunOutcome]:
        logger.info(f"📋 Scheduling {len(tasks)} run(s), parallelism {self.max_parallel}")
        self.completed = 0
        self.semaphore = asyncio.Semaphore(self.max_parallel)
        executor = ProcessPoolExecutor(max_workers=self.max_parallel) if self.max_parallel > 1 else None
        try:
            # gather preserves argument order regardless of completion order
            return list(await asyncio.gather(*(self._execute(t, executor, len(tasks)) for t in tasks)))
        finally:
            if executor is not None:
                executor.shutdown(wait=True)

    def run(self, tasks: List[RunTask]) -> List[RunOutcome]:
        """Synchronous entry point for the CLI"""
        return asyncio.run(self.schedule_and_execute(tasks))
