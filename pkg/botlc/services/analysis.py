"""
Post-hoc verification of trajectories and benchmark metrics.

Every check works on recorded samples only, so it applies equally to a
fresh run and to a trajectory loaded back from CSV. Checks whose inputs are
missing (no scenario, no regressor columns, moving target) are reported as
skipped rather than failed.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from botlc.exceptions import EmptySeries, WindowOutOfRange
from botlc.models.schemas import IntegratorSettings, MonitorConfig, PEWindowConfig, Scenario
from botlc.models.state import Diagnostic, Trajectory
from botlc.services import controller, estimator
from botlc.utils.geometry import cross, unwrap_angles


# ---------------------------------------------------------------------------
# Settling and rates
# ---------------------------------------------------------------------------

def settling_time(times, series, threshold: float) -> Optional[float]:
    """First time after which |series| stays within threshold; None if never"""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise EmptySeries("settling_time needs at least one sample")
    outside = np.flatnonzero(~(np.abs(series) <= threshold))
    if outside.size == 0:
        return float(times[0])
    last = outside[-1]
    if last == series.size - 1:
        return None
    return float(times[last + 1])


def angular_rate(trajectory: Trajectory) -> np.ndarray:
    """theta_dot by finite differences of the unwrapped bearing angle"""
    return np.gradient(unwrap_angles(trajectory.theta), trajectory.t)


def gamma_rate(trajectory: Trajectory, nu) -> np.ndarray:
    """Rate of the angle from the fixed unit vector nu to phi_perp"""
    nu = np.asarray(nu, dtype=float)
    phi_perp = trajectory.phi_perp
    gamma = np.arctan2(cross(nu, phi_perp), phi_perp @ nu)
    return np.gradient(unwrap_angles(gamma), trajectory.t)


def gamma_rate_check(trajectory: Trajectory, nu, k_omega: Optional[float] = None) -> np.ndarray:
    """Per-sample |gamma_dot - k_omega/d| for a stationary target"""
    if k_omega is None:
        if trajectory.scenario is None:
            raise ValueError("k_omega is required for trajectories without a scenario")
        k_omega = trajectory.scenario.controller.k_omega
    return np.abs(gamma_rate(trajectory, nu) - k_omega / trajectory.d)


# ---------------------------------------------------------------------------
# Persistent excitation
# ---------------------------------------------------------------------------

def excitation_gramian(times, phi_perp) -> np.ndarray:
    """Trapezoidal integral of phi_perp phi_perp^T over the given samples"""
    phi_perp = np.asarray(phi_perp, dtype=float)
    outer = phi_perp[:, :, None] * phi_perp[:, None, :]
    return integrate.trapezoid(outer, np.asarray(times, dtype=float), axis=0)


@dataclass(frozen=True)
class PECertificate:
    t0: float
    window: float
    gramian: np.ndarray
    lambda_min: float
    mu_threshold: float

    @property
    def exciting(self) -> bool:
        return self.lambda_min >= self.mu_threshold


def pe_certificate(trajectory: Trajectory, config: PEWindowConfig) -> PECertificate:
    t = trajectory.t
    start, stop = config.t0, config.t0 + config.window
    if len(t) < 2 or start < t[0] - 1e-9 or stop > t[-1] + 1e-9:
        span = f"[{t[0]:.6g}, {t[-1]:.6g}]" if len(t) else "[]"
        raise WindowOutOfRange(f"window [{start:.6g}, {stop:.6g}] s is outside the trajectory span {span} s")
    mask = trajectory.window(start, stop)
    if np.count_nonzero(mask) < 2:
        raise WindowOutOfRange(f"window [{start:.6g}, {stop:.6g}] s holds fewer than two samples")

    gramian = excitation_gramian(t[mask], trajectory.phi_perp[mask])
    return PECertificate(
        t0=start,
        window=config.window,
        gramian=gramian,
        lambda_min=float(np.linalg.eigvalsh(gramian)[0]),
        mu_threshold=config.mu_threshold,
    )


# ---------------------------------------------------------------------------
# Lyapunov decay forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LyapunovResiduals:
    """Relative residuals of the differenced V1, V2 against their closed forms"""
    t1: np.ndarray
    v1_residual: np.ndarray
    t2: np.ndarray
    v2_residual: np.ndarray

    @property
    def v1_median(self) -> float:
        return float(np.median(self.v1_residual)) if self.v1_residual.size else math.nan

    @property
    def v2_median(self) -> float:
        return float(np.median(self.v2_residual)) if self.v2_residual.size else math.nan


def _decay_residuals(t, V, exponent, t_c, valid, config: MonitorConfig):
    V_dot = np.gradient(V, t)
    in_range = (V >= config.lyapunov_low) & (V <= config.lyapunov_high)
    # Central differences need both neighbours inside the range as well
    interior = np.zeros_like(in_range)
    interior[1:-1] = in_range[1:-1] & in_range[:-2] & in_range[2:]
    mask = interior & valid
    V_m = V[mask]
    closed_form = -(1.0 / (exponent * t_c)) * V_m ** (1.0 - exponent) * np.exp(V_m ** exponent)
    return t[mask], np.abs(V_dot[mask] - closed_form) / np.abs(closed_form)


def lyapunov_decay_check(
    trajectory: Trajectory,
    config: MonitorConfig,
    t_c1: Optional[float] = None,
    t_c2: Optional[float] = None,
) -> LyapunovResiduals:
    """
    Compare finite-differenced V1 = ||x_tilde||^m and V2 = |delta|^n with
    the decay forms of the predefined-time laws.

    V1 uses samples where the estimator is active over the whole
    differencing stencil. V2 uses samples after the estimate has settled
    below `lyapunov_settle_m`, where the distance estimate is exact.
    """
    scenario = trajectory.scenario
    if t_c1 is None or t_c2 is None:
        if scenario is None:
            raise ValueError("t_c1 and t_c2 are required for trajectories without a scenario")
        t_c1 = scenario.estimator.t_c1 if t_c1 is None else t_c1
        t_c2 = scenario.controller.t_c2 if t_c2 is None else t_c2

    t = trajectory.t
    singular = (trajectory.flags & int(Diagnostic.XI_SINGULAR)) != 0
    # flags[i] covers the interval ending at sample i
    active = ~singular
    active[:-1] &= ~singular[1:]

    t1, r1 = _decay_residuals(t, trajectory.xtilde_norm ** config.m, config.p, t_c1, active, config)

    settled = settling_time(t, trajectory.xtilde_norm, config.lyapunov_settle_m) if len(t) else None
    if settled is None:
        t2, r2 = np.empty(0), np.empty(0)
    else:
        after = t >= settled - 1e-12
        t2, r2 = _decay_residuals(t, np.abs(trajectory.delta) ** config.n, config.q_exp, t_c2, after, config)

    return LyapunovResiduals(t1=t1, v1_residual=r1, t2=t2, v2_residual=r2)


# ---------------------------------------------------------------------------
# Invariant report
# ---------------------------------------------------------------------------

class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    value: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    @classmethod
    def judge(cls, name: str, value: float, tolerance: float, detail: str = "") -> "CheckResult":
        status = CheckStatus.PASS if value <= tolerance else CheckStatus.FAIL
        return cls(name, status, float(value), float(tolerance), detail)

    @classmethod
    def skip(cls, name: str, reason: str) -> "CheckResult":
        return cls(name, CheckStatus.SKIPPED, detail=reason)


@dataclass
class InvariantReport:
    scenario: str
    method: str
    checks: List[CheckResult] = field(default_factory=list)
    metrics: Dict[str, Optional[float]] = field(default_factory=dict)
    aborted: bool = False
    error: Optional[str] = None

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if c.status is CheckStatus.FAIL]

    @property
    def passed(self) -> bool:
        return not self.aborted and not self.failed

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [
            f"scenario: {self.scenario}",
            f"method:   {self.method}",
            f"verdict:  {'PASS' if self.passed else 'FAIL'}",
        ]
        if self.aborted:
            lines.append(f"aborted:  {self.error}")
        lines.append("")
        lines.append(f"{'check':<24} {'status':<8} {'value':>14} {'tolerance':>14}  detail")
        for c in self.checks:
            value = "-" if c.value is None else f"{c.value:.6g}"
            tol = "-" if c.tolerance is None else f"{c.tolerance:.6g}"
            lines.append(f"{c.name:<24} {c.status.value:<8} {value:>14} {tol:>14}  {c.detail}")
        lines.append("")
        lines.append("metrics")
        for key, value in self.metrics.items():
            lines.append(f"  {key:<30} {'-' if value is None else f'{value:.6g}'}")
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        pairs = [
            ("scenario", self.scenario),
            ("method", self.method),
            ("passed", str(self.passed).lower()),
            ("aborted", str(self.aborted).lower()),
        ]
        if self.error:
            pairs.append(("error", self.error))
        for c in self.checks:
            pairs.append((f"check.{c.name}.status", c.status.value))
            if c.value is not None:
                pairs.append((f"check.{c.name}.value", repr(c.value)))
            if c.tolerance is not None:
                pairs.append((f"check.{c.name}.tolerance", repr(c.tolerance)))
        for key, value in self.metrics.items():
            pairs.append((f"metric.{key}", "none" if value is None else repr(float(value))))
        return "".join(f"{k}={v}\n" for k, v in pairs)


def _target_stationary(trajectory: Trajectory) -> bool:
    if trajectory.scenario is not None:
        return trajectory.scenario.target_motion.is_stationary
    return bool(np.all(trajectory.target == trajectory.target[0]))


def _predefined_time(scenario: Optional[Scenario]) -> bool:
    if scenario is None:
        return False
    from botlc.methods import get_method
    return get_method(scenario.method).predefined_time


def invariant_report(trajectory: Trajectory, config: Optional[MonitorConfig] = None) -> InvariantReport:
    """Run every applicable monitor over a trajectory"""
    scenario = trajectory.scenario
    if config is None:
        config = MonitorConfig.for_scenario(scenario) if scenario is not None else MonitorConfig()

    report = InvariantReport(
        scenario=scenario.name if scenario else "trajectory",
        method=scenario.method if scenario else "unknown",
        aborted=trajectory.aborted,
        error=trajectory.error,
    )
    if trajectory.aborted or len(trajectory) < 2:
        reason = "run aborted" if trajectory.aborted else "fewer than two samples"
        for name in _CHECK_NAMES:
            report.checks.append(CheckResult.skip(name, reason))
        return report

    stationary = _target_stationary(trajectory)
    predefined = _predefined_time(scenario)
    t = trajectory.t
    xtilde = trajectory.xtilde_norm
    checks = report.checks

    # Regressor identity P x = q
    if trajectory.P is None:
        checks.append(CheckResult.skip("regressor_identity", "no regressor columns"))
    elif not stationary:
        checks.append(CheckResult.skip("regressor_identity", "target is moving"))
    else:
        residual = np.einsum("nij,nj->ni", trajectory.P, trajectory.target) - trajectory.q
        checks.append(CheckResult.judge(
            "regressor_identity", np.max(np.hypot(residual[:, 0], residual[:, 1])), config.regressor_tol,
        ))

    # Reconstructed error equals the estimation error once P is invertible
    if trajectory.sigma_min is None:
        checks.append(CheckResult.skip("reconstruction", "no regressor columns"))
    elif not stationary:
        checks.append(CheckResult.skip("reconstruction", "target is moving"))
    else:
        sigma_gate = config.sigma_gate
        if scenario is not None:
            sigma_gate = max(sigma_gate, scenario.estimator.singularity_threshold)
        gate = trajectory.sigma_min >= sigma_gate
        if not np.any(gate):
            checks.append(CheckResult.skip("reconstruction", "P never invertible"))
        else:
            diff = trajectory.xi[gate] - trajectory.x_tilde[gate]
            x_hat = trajectory.x_hat[gate]
            scaled = np.hypot(diff[:, 0], diff[:, 1]) / (1.0 + np.hypot(x_hat[:, 0], x_hat[:, 1]))
            checks.append(CheckResult.judge(
                "reconstruction", np.max(scaled), config.reconstruction_tol,
                f"{np.count_nonzero(gate)} gated samples",
            ))

    # Checks below hold for the predefined-time pair around a stationary target
    if not stationary or not predefined:
        reason = "target is moving" if not stationary else "method has no predefined-time guarantee"
        for name in _PREDEFINED_CHECKS:
            checks.append(CheckResult.skip(name, reason))
    else:
        _predefined_checks(report, trajectory, config)

    # Excitation over the last nominal orbital period
    if scenario is None:
        checks.append(CheckResult.skip("pe_certificate", "no scenario"))
    else:
        period = 2.0 * math.pi / scenario.controller.omega_star
        t0 = t[-1] - period
        if t0 < t[0]:
            checks.append(CheckResult.skip("pe_certificate", "run shorter than one orbital period"))
        else:
            cert = pe_certificate(trajectory, PEWindowConfig(t0=t0, window=period, mu_threshold=config.pe_mu))
            report.metrics["pe_lambda_min"] = cert.lambda_min
            status = CheckStatus.PASS if cert.exciting else CheckStatus.FAIL
            checks.append(CheckResult(
                "pe_certificate", status, cert.lambda_min, config.pe_mu,
                f"lambda_min over [{t0:.4g}, {t[-1]:.4g}] s must reach the tolerance",
            ))

    speed = np.hypot(trajectory.u[:, 0], trajectory.u[:, 1])
    report.metrics["max_speed_mps"] = float(np.max(speed))
    report.metrics["final_estimate_error_m"] = float(xtilde[-1])
    report.metrics["final_tracking_error_m"] = float(abs(trajectory.delta[-1]))
    return report


def _predefined_checks(report: InvariantReport, trajectory: Trajectory, config: MonitorConfig) -> None:
    scenario = trajectory.scenario
    checks = report.checks
    t = trajectory.t
    xtilde = trajectory.xtilde_norm
    est, ctl = scenario.estimator, scenario.controller

    # Estimation error is non-increasing
    increments = np.diff(xtilde)
    counted = np.maximum(xtilde[:-1], xtilde[1:]) > config.monotone_floor_m
    worst = float(np.max(increments[counted], initial=0.0))
    checks.append(CheckResult.judge(
        "estimate_monotone", max(worst, 0.0), config.monotone_tol_m,
        f"increments below {config.monotone_floor_m:.3g} m ignored",
    ))

    # Settling within the predefined times
    est_settle = settling_time(t, xtilde, config.estimate_threshold_m)
    trk_settle = settling_time(t, trajectory.delta, config.tracking_threshold_m)
    report.metrics["estimate_settling_s"] = est_settle
    report.metrics["estimate_settling_bound_s"] = estimator.settling_bound(scenario.initial.estimate_error, est)
    report.metrics["tracking_settling_s"] = trk_settle
    report.metrics["tracking_settling_bound_s"] = controller.settling_bound(
        scenario.initial.distance - ctl.d_star, ctl,
    )
    for name, settle, limit, threshold in (
        ("estimate_settling", est_settle, est.t_c1, config.estimate_threshold_m),
        ("tracking_settling", trk_settle, ctl.t_c2, config.tracking_threshold_m),
    ):
        detail = f"threshold {threshold:.3g} m"
        if settle is None:
            checks.append(CheckResult(name, CheckStatus.FAIL, None, limit + config.settle_slack_s, detail + ", never settled"))
        else:
            checks.append(CheckResult.judge(name, settle, limit + config.settle_slack_s, detail))

    # Distance stays in the invariant set
    if not config.has_distance_bounds:
        checks.append(CheckResult.skip("distance_bounds", "initial estimate error not below d*"))
    else:
        d_max = config.d_max(ctl.d_star, scenario.initial.distance)
        d = trajectory.d
        violation = float(np.max(np.maximum(config.d_min - d, d - d_max)))
        checks.append(CheckResult.judge(
            "distance_bounds", max(violation, 0.0), 0.0, f"[{config.d_min:.4g}, {d_max:.4g}] m",
        ))

    # Angular rate converges to omega*
    window = trajectory.window(config.angular_window_start_s)
    if np.count_nonzero(window) < 2:
        checks.append(CheckResult.skip("angular_rate", "window after the start time is empty"))
        checks.append(CheckResult.skip("gamma_rate", "window after the start time is empty"))
    else:
        mean_rate = float(np.mean(angular_rate(trajectory)[window]))
        report.metrics["mean_theta_rate_radps"] = mean_rate
        checks.append(CheckResult.judge(
            "angular_rate", abs(mean_rate - ctl.omega_star) / ctl.omega_star, config.angular_rel_tol,
            f"mean theta_dot {mean_rate:.6g} rad/s vs {ctl.omega_star:.6g}",
        ))
        residual = gamma_rate_check(trajectory, (1.0, 0.0))[window]
        checks.append(CheckResult.judge(
            "gamma_rate", float(np.max(residual)) / ctl.omega_star, config.angular_rel_tol,
            "max |gamma_dot - k_omega/d| relative to omega*",
        ))

    # Lyapunov decay forms
    residuals = lyapunov_decay_check(trajectory, config)
    for name, values, median in (
        ("lyapunov_v1", residuals.v1_residual, residuals.v1_median),
        ("lyapunov_v2", residuals.v2_residual, residuals.v2_median),
    ):
        if values.size == 0:
            checks.append(CheckResult.skip(name, "no samples in the valid window"))
        else:
            report.metrics[f"{name}_median_residual"] = median
            checks.append(CheckResult.judge(name, median, config.lyapunov_rel_tol, f"median over {values.size} samples"))


_PREDEFINED_CHECKS = (
    "estimate_monotone",
    "estimate_settling",
    "tracking_settling",
    "distance_bounds",
    "angular_rate",
    "gamma_rate",
    "lyapunov_v1",
    "lyapunov_v2",
)
_CHECK_NAMES = ("regressor_identity", "reconstruction") + _PREDEFINED_CHECKS + ("pe_certificate",)


# ---------------------------------------------------------------------------
# Integrator order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepHalving:
    dts: Sequence[float]
    errors: Sequence[float]

    @property
    def ratio(self) -> float:
        """Shrink factor of the global error when dt is halved"""
        return self.errors[0] / self.errors[1] if self.errors[1] > 0.0 else math.inf


def step_halving(scenario: Scenario, t_end: float = 0.1, dt: Optional[float] = None) -> StepHalving:
    """Run at dt, dt/2, dt/4 and compare d(t) at the shared sample instants"""
    from botlc.services.simengine import run

    dt = scenario.integrator.dt if dt is None else dt
    dts = (dt, dt / 2.0, dt / 4.0)
    d = []
    for level, h in enumerate(dts):
        integ = IntegratorSettings(dt=h, t_end=t_end, record_stride=2 ** level)
        trajectory = run(scenario.model_copy(update={"integrator": integ}))
        if trajectory.aborted:
            raise RuntimeError(f"step-halving run at dt={h:g} aborted: {trajectory.error}")
        d.append(trajectory.d)
    errors = (float(np.max(np.abs(d[0] - d[1]))), float(np.max(np.abs(d[1] - d[2]))))
    return StepHalving(dts=dts, errors=errors)


# ---------------------------------------------------------------------------
# Benchmark metrics
# ---------------------------------------------------------------------------

def path_length(points) -> float:
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return 0.0
    steps = np.diff(points, axis=0)
    return float(np.sum(np.hypot(steps[:, 0], steps[:, 1])))


def compare_metrics(trajectory: Trajectory, settle_threshold: float) -> Dict[str, Optional[float]]:
    """Row of the comparison summary table"""
    xtilde = trajectory.xtilde_norm
    return {
        "estimate_settling_s": settling_time(trajectory.t, xtilde, settle_threshold),
        "tracking_settling_s": settling_time(trajectory.t, trajectory.delta, settle_threshold),
        "final_estimate_error_m": float(xtilde[-1]),
        "final_tracking_error_m": float(abs(trajectory.delta[-1])),
        "xhat_path_length_m": path_length(trajectory.x_hat),
    }


def spearman(x, y) -> float:
    """Rank correlation; nan when either input is constant"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.all(x == x[0]) or np.all(y == y[0]):
        return math.nan
    return float(stats.spearmanr(x, y).statistic)
