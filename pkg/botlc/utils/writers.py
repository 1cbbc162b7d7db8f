"""
Artifact writers: trajectory CSVs, scenario sidecar, reports and SVG plots.

Every file is written to a temporary sibling first and moved into place
with os.replace, so readers never observe a half-written artifact.
"""
import contextlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from botlc.exceptions import TrajectoryFormatError  # noqa: E402
from botlc.models.schemas import EmitKind, Scenario  # noqa: E402
from botlc.models.state import CSV_COLUMNS, REGRESSOR_COLUMNS, Trajectory  # noqa: E402
from botlc.services.analysis import InvariantReport, angular_rate  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed ids and no timestamp keep SVG output byte-stable across runs
plt.rcParams["svg.hashsalt"] = "botlc"
_SVG_METADATA = {"Date": None}

CSV_FORMATS = ["%.17g"] * (len(CSV_COLUMNS) - 1) + ["%d"]


@contextlib.contextmanager
def atomic_path(path: Path) -> Iterator[Path]:
    """Yield a temporary path that replaces `path` on successful exit"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def atomic_write_text(path: Path, text: str) -> Path:
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8")
    return Path(path)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    with atomic_path(path) as tmp:
        np.savetxt(
            tmp, trajectory.table(), fmt=CSV_FORMATS, delimiter=",",
            header=",".join(CSV_COLUMNS), comments="",
        )
    return Path(path)


def write_regressors_csv(path: Path, trajectory: Trajectory) -> Path:
    P = trajectory.P
    table = np.column_stack([
        trajectory.t, P[:, 0, 0], 0.5 * (P[:, 0, 1] + P[:, 1, 0]), P[:, 1, 1],
        trajectory.q, trajectory.sigma_min, trajectory.rho_hat,
    ])
    with atomic_path(path) as tmp:
        np.savetxt(tmp, table, fmt="%.17g", delimiter=",", header=",".join(REGRESSOR_COLUMNS), comments="")
    return Path(path)


def write_scenario_json(path: Path, scenario: Scenario) -> Path:
    return atomic_write_text(path, scenario.model_dump_json(by_alias=True, indent=2) + "\n")


def _read_table(path: Path, columns) -> np.ndarray:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as f:
            header = f.readline().strip()
    except FileNotFoundError:
        raise TrajectoryFormatError(f"{path}: file not found") from None
    if header.split(",") != list(columns):
        raise TrajectoryFormatError(f"{path}: header does not match the expected columns {','.join(columns)}")
    try:
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise TrajectoryFormatError(f"{path}: {exc}") from exc


def load_trajectory_csv(path: Path) -> Trajectory:
    """
    Read a trajectory CSV back, attaching `scenario.json` and
    `regressors.csv` from the same directory when they exist.
    """
    path = Path(path)
    table = _read_table(path, CSV_COLUMNS)
    if table.shape[0] == 0:
        raise TrajectoryFormatError(f"{path}: no samples")

    scenario = None
    sidecar = path.parent / "scenario.json"
    if sidecar.exists():
        scenario = Scenario.model_validate_json(sidecar.read_text(encoding="utf-8"))

    trajectory = Trajectory(
        t=table[:, 0],
        agent=table[:, 1:3],
        target=table[:, 3:5],
        x_hat=table[:, 5:7],
        xi=table[:, 7:9],
        d=table[:, 9],
        d_hat=table[:, 10],
        u=table[:, 14:16],
        theta=table[:, 16],
        flags=table[:, 17].astype(int),
        scenario=scenario,
        desired_radius=float(table[0, 9] - table[0, 11]),
    )

    regressors = path.parent / "regressors.csv"
    if regressors.exists():
        reg = _read_table(regressors, REGRESSOR_COLUMNS)
        if reg.shape[0] == table.shape[0]:
            trajectory.P = np.stack([
                np.column_stack([reg[:, 1], reg[:, 2]]),
                np.column_stack([reg[:, 2], reg[:, 3]]),
            ], axis=1)
            trajectory.q = reg[:, 4:6]
            trajectory.sigma_min = reg[:, 6]
            trajectory.rho_hat = reg[:, 7]
        else:
            logger.warning(f"⚠️  Ignoring {regressors}: row count differs from {path.name}")
    return trajectory


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def write_report(out_dir: Path, report: InvariantReport) -> List[Path]:
    out_dir = Path(out_dir)
    return [
        atomic_write_text(out_dir / "report.txt", report.to_text()),
        atomic_write_text(out_dir / "report.kv", report.to_kv()),
    ]


def write_table_csv(path: Path, header: List[str], rows: Iterable[List]) -> Path:
    """Small mixed-type table; None becomes an empty cell"""
    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            return "%.17g" % value
        return str(value)

    lines = [",".join(header)] + [",".join(cell(v) for v in row) for row in rows]
    return atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Plots
# ---------------------------------------------------------------------------

def _save(fig, path: Path) -> Path:
    with atomic_path(path) as tmp:
        fig.savefig(tmp, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    return Path(path)


def _series_plots(trajectories: Dict[str, Trajectory], out_dir: Path, prefix: str) -> List[Path]:
    out_dir = Path(out_dir)
    written = []

    fig, ax = plt.subplots(figsize=(6, 6))
    for label, traj in trajectories.items():
        ax.plot(traj.agent[:, 0], traj.agent[:, 1], linewidth=1.0, label=f"{label} agent")
        ax.plot(traj.x_hat[:, 0], traj.x_hat[:, 1], linewidth=0.8, linestyle="--", label=f"{label} estimate")
    first = next(iter(trajectories.values()))
    ax.plot(first.target[:, 0], first.target[:, 1], "k-", linewidth=1.5)
    ax.plot(first.target[-1, 0], first.target[-1, 1], "k*", markersize=10, label="target")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(fontsize="small")
    written.append(_save(fig, out_dir / f"{prefix}agent_path.svg"))

    panels = (
        ("estimate_error", "||x_tilde|| [m]", lambda tr: tr.xtilde_norm, True),
        ("tracking_error", "|delta| [m]", lambda tr: np.abs(tr.delta), True),
        ("angular_rate", "theta_dot [rad/s]", angular_rate, False),
    )
    for name, ylabel, series, log_scale in panels:
        fig, ax = plt.subplots(figsize=(7, 4))
        for label, traj in trajectories.items():
            values = series(traj)
            if log_scale:
                # Exact zeros cannot be drawn on a log axis
                values = np.where(values > 0.0, values, np.nan)
            ax.plot(traj.t, values, linewidth=1.0, label=label)
        if log_scale:
            ax.set_yscale("log")
        ax.set_xlabel("t [s]")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", alpha=0.3)
        if len(trajectories) > 1:
            ax.legend(fontsize="small")
        written.append(_save(fig, out_dir / f"{prefix}{name}.svg"))
    return written


def write_plots(out_dir: Path, trajectory: Trajectory) -> List[Path]:
    """agent path, ||x_tilde||, |delta| and theta_dot of one run"""
    label = trajectory.scenario.method if trajectory.scenario else "run"
    return _series_plots({label: trajectory}, Path(out_dir) / "plots", "")


def write_comparison_plots(out_dir: Path, trajectories: Dict[str, Trajectory]) -> List[Path]:
    return _series_plots(trajectories, Path(out_dir), "compare_")


# ---------------------------------------------------------------------------
# One run
# ---------------------------------------------------------------------------

def write_run_artifacts(
    out_dir: Path,
    trajectory: Trajectory,
    report: Optional[InvariantReport],
    emit: Iterable[EmitKind],
) -> List[Path]:
    """Write everything `emit` asks for; the scenario sidecar is always written"""
    out_dir = Path(out_dir)
    emit = {EmitKind(e) for e in emit}
    written: List[Path] = []
    if trajectory.scenario is not None:
        written.append(write_scenario_json(out_dir / "scenario.json", trajectory.scenario))
    if EmitKind.CSV in emit:
        written.append(write_trajectory_csv(out_dir / "trajectory.csv", trajectory))
        if trajectory.P is not None:
            written.append(write_regressors_csv(out_dir / "regressors.csv", trajectory))
    if EmitKind.SVG in emit and len(trajectory) > 1:
        written.extend(write_plots(out_dir, trajectory))
    if EmitKind.REPORT in emit and report is not None:
        written.extend(write_report(out_dir, report))
    return written
