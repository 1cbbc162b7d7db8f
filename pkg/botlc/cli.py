"""
Command-line front end.

    botlc run <scenario.toml>... [-o DIR] [--emit csv,svg,report] [-j N]
    botlc compare <manifest.toml> [-o DIR] [--emit ...] [-j N]
    botlc sweep <manifest.toml> [-o DIR] [--emit ...] [-j N]
    botlc check <trajectory.csv>
    botlc serve [--host HOST] [--port PORT]

Exit codes: 0 ok, 1 invariant failure, 2 configuration error, 3 run aborted.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from botlc.config import settings
from botlc.exceptions import ScenarioError, TrajectoryFormatError
from botlc.models.schemas import EmitKind, RunManifest
from botlc.services.analysis import invariant_report
from botlc.services.benchmark import run_compare, run_sweep
from botlc.services.task_scheduler import EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, RunScheduler, RunTask
from botlc.utils.scenario_io import load_compare_manifest, load_scenario, load_sweep_manifest
from botlc.utils.writers import load_trajectory_csv

logger = logging.getLogger("botlc")


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def parse_emit(value: str) -> frozenset:
    try:
        return frozenset(EmitKind(kind.strip()) for kind in value.split(",") if kind.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid emit list '{value}', expected a subset of {','.join(k.value for k in EmitKind)}"
        ) from None


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    try:
        scenarios = [load_scenario(path) for path in args.scenarios]
        manifest = RunManifest(
            scenarios=scenarios,
            output_dir=args.output or settings.OUT,
            emit=args.emit,
            parallelism=args.jobs,
        )
    except (ScenarioError, ValidationError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_CONFIG

    names = [s.name for s in manifest.scenarios]
    if len(set(names)) != len(names):
        logger.error("❌ scenario names must be unique within one run")
        return EXIT_CONFIG

    tasks = [RunTask(s, manifest.output_dir / s.name, manifest.emit) for s in manifest.scenarios]
    outcomes = RunScheduler(manifest.parallelism).run(tasks)

    print(f"{'scenario':<28} {'method':<10} {'exit':>4}  failed checks")
    for outcome in outcomes:
        failed = ",".join(outcome.report.failed) or ("aborted" if outcome.trajectory.aborted else "-")
        print(f"{outcome.scenario.name:<28} {outcome.scenario.method:<10} {outcome.exit_code:>4}  {failed}")
    return max(o.exit_code for o in outcomes)


def cmd_compare(args) -> int:
    try:
        manifest, scenarios = load_compare_manifest(args.manifest)
    except (ScenarioError, ValidationError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_CONFIG

    out_dir = (args.output or settings.OUT) / manifest.name
    result = run_compare(manifest, scenarios, out_dir, emit=args.emit, parallelism=args.jobs)

    print(f"{'label':<14} {'est. settle [s]':>16} {'trk. settle [s]':>16} "
          f"{'final |x~| [m]':>16} {'final |d| [m]':>16} {'path x^ [m]':>12} {'exit':>5}")
    for row in result.rows:
        print(f"{row['label']:<14} {_fmt(row['estimate_settling_s']):>16} {_fmt(row['tracking_settling_s']):>16} "
              f"{_fmt(row['final_estimate_error_m']):>16} {_fmt(row['final_tracking_error_m']):>16} "
              f"{_fmt(row['xhat_path_length_m']):>12} {row['exit_code']:>5}")
    print(f"summary: {result.summary_path}")
    return result.exit_code


def cmd_sweep(args) -> int:
    try:
        manifest, scenarios = load_sweep_manifest(args.manifest)
    except (ScenarioError, ValidationError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_CONFIG

    out_dir = (args.output or settings.OUT) / manifest.name
    result = run_sweep(manifest, scenarios, out_dir, emit=args.emit, parallelism=args.jobs)

    print(f"{'offset [m]':>12} {'settling [s]':>14} {'limit [s]':>12}  passed")
    for offset, settle, ok in zip(result.offsets, result.settling, result.passed):
        print(f"{offset:>12g} {_fmt(settle):>14} {result.limit_s:>12.6g}  {'yes' if ok else 'no'}")
    print(f"spearman(offset, settling) = {_fmt(result.correlation)}")
    return result.exit_code


def cmd_check(args) -> int:
    try:
        trajectory = load_trajectory_csv(args.trajectory)
    except (TrajectoryFormatError, ValidationError) as exc:
        logger.error(f"❌ {exc}")
        return EXIT_CONFIG

    report = invariant_report(trajectory)
    print(report.to_text(), end="")
    return EXIT_OK if report.passed else EXIT_INVARIANT


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("botlc.main:app", host=args.host, port=args.port, reload=settings.DEBUG)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="botlc",
        description="Bearing-only target localization and circumnavigation benchmark",
    )
    parser.add_argument("--log-level", default=None, help="overrides BOTLC_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    def batch_options(p):
        p.add_argument("-o", "--output", type=Path, default=None, help="output root (default: BOTLC_OUT)")
        p.add_argument("--emit", type=parse_emit, default=parse_emit(settings.EMIT),
                       help="comma-separated subset of csv,svg,report")
        p.add_argument("-j", "--jobs", type=int, default=settings.PARALLELISM, help="parallel runs")

    p = sub.add_parser("run", help="simulate one or more scenarios")
    p.add_argument("scenarios", nargs="+", type=Path)
    batch_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run several methods on shared initial conditions")
    p.add_argument("manifest", type=Path)
    batch_options(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="settling times across initial estimate offsets")
    p.add_argument("manifest", type=Path)
    batch_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="re-run the invariant report on a trajectory CSV")
    p.add_argument("trajectory", type=Path)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("serve", help="start the HTTP job surface")
    p.add_argument("--host", default=settings.HOST)
    p.add_argument("--port", type=int, default=settings.PORT)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config error code
        return int(exc.code or 0)
    configure_logging(args.log_level)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
