"""
Pydantic models for scenarios, manifests, monitors and API payloads
"""
import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Pair = Tuple[float, float]


class FrozenModel(BaseModel):
    """Immutable model; file keys are the aliases (with units)"""
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")


def _finite_pair(value: Pair) -> Pair:
    if not all(math.isfinite(c) for c in value):
        raise ValueError(f"vector components must be finite, got {value}")
    return value


# ---------------------------------------------------------------------------
# Method parameters
# ---------------------------------------------------------------------------

class EstimatorParams(FrozenModel):
    """Gains of the predefined-time target estimator"""
    alpha1: float = Field(0.5, gt=0.0, le=1.0)
    t_c1: float = Field(0.2, gt=0.0, alias="t_c1_s")
    singularity_threshold: float = Field(1e-8, gt=0.0)
    exp_arg_cap: float = Field(50.0, gt=0.0)


class ControllerParams(FrozenModel):
    """Gains of the predefined-time circumnavigation law"""
    alpha2: float = Field(0.5, gt=0.0, le=1.0)
    t_c2: float = Field(0.4, gt=0.0, alias="t_c2_s")
    d_star: float = Field(2.0, gt=0.0, alias="d_star_m")
    omega_star: float = Field(2.5, gt=0.0, alias="omega_star_radps")
    exp_arg_cap: float = Field(50.0, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def _derive_omega_star(cls, data):
        # Files may state the tangential gain instead of the angular rate
        if not isinstance(data, dict) or "k_omega_mps" not in data:
            return data
        data = dict(data)
        k_omega = float(data.pop("k_omega_mps"))
        d_star = float(data.get("d_star_m", data.get("d_star", 2.0)))
        if not d_star > 0.0:
            raise ValueError(f"d_star_m must be positive, got {d_star}")
        omega = k_omega / d_star
        given = data.get("omega_star_radps", data.get("omega_star"))
        if given is not None and not math.isclose(float(given), omega, rel_tol=1e-12):
            raise ValueError(
                f"k_omega_mps={k_omega} and omega_star_radps={given} disagree "
                f"(k_omega must equal omega_star * d_star)"
            )
        data["omega_star_radps"] = omega
        return data

    @property
    def k_omega(self) -> float:
        return self.omega_star * self.d_star


class BaselineParams(FrozenModel):
    """Gains of the three comparison methods"""
    # Deghat
    k_est: float = Field(5.0, gt=0.0)
    k_alpha: float = Field(1.5, gt=0.0)
    k_beta: float = Field(5.0, gt=0.0)
    # Cao
    k_e: float = Field(5.0, gt=0.0)
    kappa_alpha: float = Field(1.5, gt=0.0)
    kappa_beta: float = Field(5.0, gt=0.0)
    # Chen
    kappa_est: float = Field(5.0, gt=0.0)
    k_d: float = Field(1.5, gt=0.0)
    k_phi: float = Field(5.0, gt=0.0)
    beta1: float = Field(0.5, gt=0.0, lt=1.0)
    beta2: float = Field(0.5, gt=0.0, lt=1.0)
    chen_residual: Literal["q", "y"] = "q"


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

class TargetMotion(FrozenModel):
    """Ground-truth target velocity model"""
    kind: Literal["stationary", "drift_profile", "constant_velocity"] = "stationary"
    velocity: Pair = Field((0.0, 0.0), alias="velocity_mps")

    @field_validator("velocity")
    @classmethod
    def _finite_velocity(cls, value: Pair) -> Pair:
        return _finite_pair(value)

    @property
    def is_stationary(self) -> bool:
        return self.kind == "stationary" or (
            self.kind == "constant_velocity" and self.velocity == (0.0, 0.0)
        )

    def velocity_at(self, t: float) -> np.ndarray:
        if self.kind == "drift_profile":
            phase = 2.0 * math.pi * 0.03 * t
            return np.array([
                -0.0125 - 0.0125 * math.exp(-0.05 * t) * abs(math.sin(phase)),
                -0.075 * math.exp(-0.1 * t) * abs(math.cos(phase)),
            ])
        if self.kind == "constant_velocity":
            return np.array(self.velocity, dtype=float)
        return np.zeros(2)


class InitialConditions(FrozenModel):
    agent: Pair = Field(alias="agent_m")
    target: Pair = Field(alias="target_m")
    x_hat: Pair = Field(alias="x_hat_m")
    # Range estimate for methods that carry one; defaults to the projection
    # of the initial estimate onto the initial bearing
    rho_hat: Optional[float] = Field(None, alias="rho_hat_m")

    @field_validator("agent", "target", "x_hat")
    @classmethod
    def _finite_positions(cls, value: Pair) -> Pair:
        return _finite_pair(value)

    @property
    def distance(self) -> float:
        return math.hypot(self.target[0] - self.agent[0], self.target[1] - self.agent[1])

    @property
    def estimate_error(self) -> float:
        return math.hypot(self.x_hat[0] - self.target[0], self.x_hat[1] - self.target[1])


class IntegratorSettings(FrozenModel):
    dt: float = Field(1e-4, gt=0.0, alias="dt_s")
    t_end: float = Field(5.0, ge=0.0, alias="t_end_s")
    record_stride: int = Field(10, ge=1)

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))

    @property
    def n_samples(self) -> int:
        return self.n_steps // self.record_stride + 1


class Scenario(FrozenModel):
    """One simulation case: geometry, method, gains, target motion, integrator"""
    name: str = "scenario"
    method: str = "proposed"
    initial: InitialConditions
    estimator: EstimatorParams = EstimatorParams()
    controller: ControllerParams = ControllerParams()
    baselines: BaselineParams = BaselineParams()
    target_motion: TargetMotion = TargetMotion()
    integrator: IntegratorSettings = IntegratorSettings()
    # Overrides applied on top of the derived monitor defaults
    monitor: Dict[str, float] = {}

    @field_validator("method")
    @classmethod
    def _known_method(cls, value: str) -> str:
        from botlc.methods import METHODS
        if value not in METHODS:
            raise ValueError(f"unknown method '{value}', expected one of {sorted(METHODS)}")
        return value

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.initial.distance < 1e-12:
            raise ValueError(
                "initial distance d(0) must be positive: "
                "agent and target must start at distinct positions"
            )
        if not self.controller.t_c2 > self.estimator.t_c1:
            raise ValueError(
                f"t_c2_s ({self.controller.t_c2}) must exceed t_c1_s ({self.estimator.t_c1}): "
                "the tracking settling time has to follow the estimation settling time"
            )
        if self.monitor:
            MonitorConfig.for_scenario(self)
        return self


# ---------------------------------------------------------------------------
# Analysis configuration
# ---------------------------------------------------------------------------

class PEWindowConfig(FrozenModel):
    """Excitation window [t0, t0 + window] and the level mu it must reach"""
    t0: float = Field(ge=0.0)
    window: float = Field(gt=0.0)
    mu_threshold: float = Field(0.1, gt=0.0)


class MonitorConfig(FrozenModel):
    """Constants and tolerances of the invariant monitors"""
    # Distance-bound set; None when the initial estimate error is not
    # smaller than the desired radius
    d_min: Optional[float] = None
    d_s: Optional[float] = None
    d_varpi: Optional[float] = None
    eta: Optional[float] = None

    # Lyapunov exponents, m*p = alpha1 and n*q_exp = alpha2
    m: float = Field(2.0, ge=1.0)
    p: float = Field(0.25, gt=0.0)
    n: float = Field(2.0, ge=1.0)
    q_exp: float = Field(0.25, gt=0.0)

    regressor_tol: float = 1e-6
    reconstruction_tol: float = 1e-6
    sigma_gate: float = 1e-8
    monotone_tol_m: float = 1e-9
    # Below this norm the fixed-step integration of the finite-time law
    # dithers; increments there are not counted as violations
    monotone_floor_m: float = 1e-6
    estimate_threshold_m: float = 1e-3
    tracking_threshold_m: float = 1e-2
    settle_slack_s: float = 2e-4
    angular_window_start_s: float = 1.0
    angular_rel_tol: float = 0.01
    pe_mu: float = 0.1
    lyapunov_low: float = 1e-6
    lyapunov_high: float = 1e2
    lyapunov_rel_tol: float = 0.01
    # Estimator considered settled for the V2 window once below this norm
    lyapunov_settle_m: float = 1e-6

    @model_validator(mode="after")
    def _check_ordering(self):
        bounds = (self.d_varpi, self.d_min, self.d_s, self.eta)
        if any(b is not None for b in bounds):
            if any(b is None for b in bounds):
                raise ValueError("d_varpi, d_min, d_s and eta must be given together")
            if not 0.0 < self.d_varpi < self.d_min < self.d_s < self.eta:
                raise ValueError("distance constants must satisfy 0 < d_varpi < d_min < d_s < eta")
        return self

    @property
    def has_distance_bounds(self) -> bool:
        return self.eta is not None

    @classmethod
    def for_scenario(cls, scenario: Scenario) -> "MonitorConfig":
        """Documented defaults derived from a scenario"""
        est, ctl, integ = scenario.estimator, scenario.controller, scenario.integrator
        values: Dict[str, float] = {
            "p": est.alpha1 / 2.0,
            "q_exp": ctl.alpha2 / 2.0,
            "settle_slack_s": 2.0 * integ.dt,
            "angular_window_start_s": 2.5 * ctl.t_c2,
            "monotone_floor_m": max(1e-9, (integ.dt / (est.alpha1 * est.t_c1)) ** 2),
        }
        eta = ctl.d_star - scenario.initial.estimate_error
        if eta > 0.0:
            d_s = 0.9 * eta
            d_min = 0.5 * d_s
            values.update(eta=eta, d_s=d_s, d_min=d_min, d_varpi=0.5 * d_min)
        values.update(scenario.monitor)
        return cls(**values)

    def d_max(self, d_star: float, d0: float) -> float:
        return max(2.0 * d_star - self.d_s, d0) + self.d_varpi


# ---------------------------------------------------------------------------
# Batch manifests
# ---------------------------------------------------------------------------

class EmitKind(str, Enum):
    CSV = "csv"
    SVG = "svg"
    REPORT = "report"


class RunManifest(FrozenModel):
    """What to run and where the artifacts go"""
    scenarios: List[Scenario] = Field(min_length=1)
    output_dir: Path
    emit: frozenset[EmitKind] = frozenset(EmitKind)
    parallelism: int = Field(1, ge=1)


class CompareManifest(FrozenModel):
    name: str = "comparison"
    base: Path
    methods: List[str]
    settle_threshold_m: float = Field(1e-2, gt=0.0)
    overrides: Dict = {}

    @field_validator("methods")
    @classmethod
    def _at_least_two(cls, value: List[str]) -> List[str]:
        if len(value) < 2:
            raise ValueError("compare requires at least two method variants")
        return value


class SweepManifest(FrozenModel):
    name: str = "sweep"
    base: Path
    offsets_m: List[float]
    # Offset direction; defaults to the base scenario's initial estimate error
    direction: Optional[Pair] = None
    settle_threshold_m: float = Field(1e-3, gt=0.0)
    settle_slack_s: Optional[float] = Field(None, ge=0.0)
    overrides: Dict = {}

    @field_validator("offsets_m")
    @classmethod
    def _non_empty(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("sweep requires at least one initial estimate offset")
        if any(not math.isfinite(v) or v < 0.0 for v in value):
            raise ValueError("offsets must be finite and non-negative")
        return value


# ---------------------------------------------------------------------------
# HTTP payloads
# ---------------------------------------------------------------------------

class ScenarioSummary(BaseModel):
    """Uploaded scenario as seen by the API"""
    filename: str
    name: str
    method: str
    t_end_s: float
    dt_s: float


class UploadResponse(BaseModel):
    session_id: str
    scenarios_uploaded: int
    scenarios: List[ScenarioSummary]


class RunState(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class RunRequest(BaseModel):
    session_id: str
    emit: List[EmitKind] = [EmitKind.CSV, EmitKind.REPORT]


class RunProgress(BaseModel):
    session_id: str
    status: RunState
    progress: int = Field(ge=0, le=100)
    message: str
    scenarios_done: int
    total_scenarios: int


class ScenarioOutcome(BaseModel):
    name: str
    exit_code: int
    aborted: bool
    failed_checks: List[str] = []
    files: List[str] = []


class RunResult(BaseModel):
    session_id: str
    status: RunState
    outcomes: List[ScenarioOutcome]
    download_urls: List[str]
