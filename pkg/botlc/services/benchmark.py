"""
Method comparison and initial-estimate sweeps
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional

from botlc.models.schemas import CompareManifest, EmitKind, Scenario, SweepManifest
from botlc.services.analysis import compare_metrics, settling_time, spearman
from botlc.services.task_scheduler import EXIT_ABORT, EXIT_INVARIANT, EXIT_OK, RunOutcome, RunScheduler, RunTask
from botlc.utils.scenario_io import variant_labels
from botlc.utils.writers import write_comparison_plots, write_table_csv

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "label", "method", "estimate_settling_s", "tracking_settling_s",
    "final_estimate_error_m", "final_tracking_error_m", "xhat_path_length_m", "exit_code",
]
SWEEP_COLUMNS = ["offset_m", "settling_s", "limit_s", "passed", "exit_code"]


@dataclass
class CompareResult:
    rows: List[Dict]
    outcomes: List[RunOutcome]
    summary_path: Path
    exit_code: int

    def row(self, label: str) -> Dict:
        return next(r for r in self.rows if r["label"] == label)


def run_compare(
    manifest: CompareManifest,
    scenarios: List[Scenario],
    out_dir: Path,
    emit: FrozenSet[EmitKind] = frozenset(EmitKind),
    parallelism: int = 1,
) -> CompareResult:
    """Run every method variant on shared initial conditions and tabulate"""
    out_dir = Path(out_dir)
    labels = [label for label, _ in variant_labels(manifest.methods)]
    tasks = [RunTask(s, out_dir / label, emit) for label, s in zip(labels, scenarios)]

    logger.info(f"🚀 Comparing {len(tasks)} variant(s): {', '.join(labels)}")
    outcomes = RunScheduler(parallelism).run(tasks)

    rows = []
    for label, outcome in zip(labels, outcomes):
        row = {"label": label, "method": outcome.scenario.method}
        row.update(compare_metrics(outcome.trajectory, manifest.settle_threshold_m))
        row["exit_code"] = outcome.exit_code
        rows.append(row)

    summary_path = write_table_csv(
        out_dir / "summary.csv", SUMMARY_COLUMNS, ([r[c] for c in SUMMARY_COLUMNS] for r in rows),
    )
    if EmitKind.SVG in emit and all(len(o.trajectory) > 1 for o in outcomes):
        write_comparison_plots(out_dir, {label: o.trajectory for label, o in zip(labels, outcomes)})

    exit_code = max(o.exit_code for o in outcomes)
    logger.info(f"📊 Comparison '{manifest.name}' finished with exit code {exit_code}")
    return CompareResult(rows=rows, outcomes=outcomes, summary_path=summary_path, exit_code=exit_code)


@dataclass
class SweepResult:
    offsets: List[float]
    settling: List[Optional[float]]
    limit_s: float
    correlation: float
    outcomes: List[RunOutcome]
    table_path: Path
    exit_code: int

    @property
    def passed(self) -> List[bool]:
        return [s is not None and s <= self.limit_s for s in self.settling]


def run_sweep(
    manifest: SweepManifest,
    scenarios: List[Scenario],
    out_dir: Path,
    emit: FrozenSet[EmitKind] = frozenset(EmitKind),
    parallelism: int = 1,
) -> SweepResult:
    """
    Run the estimator from each initial estimate offset and test that every
    settling time stays within t_c1 plus slack, whatever the offset.
    """
    out_dir = Path(out_dir)
    tasks = [RunTask(s, out_dir / s.name, emit) for s in scenarios]
    logger.info(f"🚀 Sweeping {len(tasks)} initial estimate offset(s)")
    outcomes = RunScheduler(parallelism).run(tasks)

    reference = scenarios[0]
    slack = manifest.settle_slack_s if manifest.settle_slack_s is not None else 2.0 * reference.integrator.dt
    limit = reference.estimator.t_c1 + slack

    settling = [
        None if o.trajectory.aborted
        else settling_time(o.trajectory.t, o.trajectory.xtilde_norm, manifest.settle_threshold_m)
        for o in outcomes
    ]
    finite = [(off, s) for off, s in zip(manifest.offsets_m, settling) if s is not None]
    correlation = spearman(*zip(*finite)) if len(finite) > 1 else float("nan")

    result_rows = []
    exit_code = EXIT_OK
    for offset, settle, outcome in zip(manifest.offsets_m, settling, outcomes):
        ok = settle is not None and settle <= limit
        result_rows.append([float(offset), settle, limit, str(ok).lower(), outcome.exit_code])
        if outcome.trajectory.aborted:
            exit_code = EXIT_ABORT
        elif not ok:
            exit_code = max(exit_code, EXIT_INVARIANT)

    table_path = write_table_csv(out_dir / "sweep.csv", SWEEP_COLUMNS, result_rows)
    logger.info(f"📊 Sweep '{manifest.name}': Spearman rho = {correlation:.3f}, exit code {exit_code}")
    return SweepResult(
        offsets=list(manifest.offsets_m),
        settling=settling,
        limit_s=limit,
        correlation=correlation,
        outcomes=outcomes,
        table_path=table_path,
        exit_code=exit_code,
    )
