"""
Value types of the simulation core: regressors, world state, trajectories
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntFlag
from typing import Optional

import numpy as np

from botlc.models.schemas import Scenario

# Flat layout used by the integrator
STATE_SIZE = 13
_AGENT, _TARGET, _X_HAT, _P, _Q, _RHO = (
    slice(0, 2), slice(2, 4), slice(4, 6), slice(6, 10), slice(10, 12), 12,
)


class Diagnostic(IntFlag):
    """Events raised while evaluating the vector field"""
    NONE = 0
    XI_SINGULAR = 1
    ESTIMATOR_SATURATED = 2
    CONTROL_SATURATED = 4

    def label(self) -> str:
        if not self:
            return "-"
        return "|".join(flag.name.lower() for flag in Diagnostic if flag and flag in self)


def symmetric_sigma_min(p11: float, p12: float, p22: float) -> float:
    """Smallest singular value of a symmetric 2x2 matrix"""
    mean = 0.5 * (p11 + p22)
    radius = math.hypot(0.5 * (p11 - p22), p12)
    return min(abs(mean - radius), abs(mean + radius))


@dataclass(frozen=True, slots=True)
class RegressorState:
    """Filtered regressor pair (P, q) with conditioning diagnostics"""
    P: np.ndarray
    q: np.ndarray
    det: float
    sigma_min: float

    @classmethod
    def from_arrays(cls, P, q) -> "RegressorState":
        P = np.asarray(P, dtype=float).reshape(2, 2)
        q = np.asarray(q, dtype=float).reshape(2)
        # P is symmetric up to round-off; use the mean off-diagonal term
        p12 = 0.5 * (P[0, 1] + P[1, 0])
        return cls(
            P=P,
            q=q,
            det=float(P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]),
            sigma_min=symmetric_sigma_min(P[0, 0], p12, P[1, 1]),
        )

    @classmethod
    def zero(cls) -> "RegressorState":
        return cls(P=np.zeros((2, 2)), q=np.zeros(2), det=0.0, sigma_min=0.0)


@dataclass(frozen=True, slots=True)
class WorldState:
    """Full ODE state at time t"""
    t: float
    agent: np.ndarray
    target: np.ndarray
    x_hat: np.ndarray
    regressors: RegressorState
    cao_rho: Optional[float] = None

    @classmethod
    def initial(cls, scenario: Scenario, cao_rho: Optional[float] = None) -> "WorldState":
        init = scenario.initial
        return cls(
            t=0.0,
            agent=np.array(init.agent, dtype=float),
            target=np.array(init.target, dtype=float),
            x_hat=np.array(init.x_hat, dtype=float),
            regressors=RegressorState.zero(),
            cao_rho=cao_rho,
        )

    def to_vector(self) -> np.ndarray:
        z = np.empty(STATE_SIZE)
        z[_AGENT] = self.agent
        z[_TARGET] = self.target
        z[_X_HAT] = self.x_hat
        z[_P] = self.regressors.P.reshape(4)
        z[_Q] = self.regressors.q
        z[_RHO] = 0.0 if self.cao_rho is None else self.cao_rho
        return z

    @classmethod
    def from_vector(cls, t: float, z: np.ndarray, with_rho: bool) -> "WorldState":
        return cls(
            t=t,
            agent=z[_AGENT],
            target=z[_TARGET],
            x_hat=z[_X_HAT],
            regressors=RegressorState.from_arrays(z[_P], z[_Q]),
            cao_rho=float(z[_RHO]) if with_rho else None,
        )


@dataclass(frozen=True, slots=True)
class MethodOutput:
    """What a guidance method produces at one state"""
    u: np.ndarray
    x_hat_dot: np.ndarray
    x_hat: np.ndarray
    d_hat: float
    rho_dot: float = 0.0
    flags: Diagnostic = Diagnostic.NONE


@dataclass(frozen=True, slots=True)
class WorldTangent:
    """Time derivative of a WorldState"""
    agent: np.ndarray
    target: np.ndarray
    x_hat: np.ndarray
    P: np.ndarray
    q: np.ndarray
    cao_rho: float
    xi: np.ndarray
    output: MethodOutput

    def to_vector(self) -> np.ndarray:
        z = np.empty(STATE_SIZE)
        z[_AGENT] = self.agent
        z[_TARGET] = self.target
        z[_X_HAT] = self.x_hat
        z[_P] = self.P.reshape(4)
        z[_Q] = self.q
        z[_RHO] = self.cao_rho
        return z


CSV_COLUMNS = (
    "t", "y_x", "y_y", "x_x", "x_y", "xhat_x", "xhat_y", "xi_x", "xi_y",
    "d", "dhat", "delta", "varrho", "xtilde_norm", "u_x", "u_y", "theta", "flags",
)

REGRESSOR_COLUMNS = ("t", "p11", "p12", "p22", "q_x", "q_y", "sigma_min", "rho_hat")


@dataclass
class Trajectory:
    """Uniformly sampled record of a run"""
    t: np.ndarray
    agent: np.ndarray
    target: np.ndarray
    x_hat: np.ndarray
    xi: np.ndarray
    d: np.ndarray
    d_hat: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    flags: np.ndarray
    # Regressor columns are absent for trajectories loaded without sidecar
    P: Optional[np.ndarray] = None
    q: Optional[np.ndarray] = None
    sigma_min: Optional[np.ndarray] = None
    rho_hat: Optional[np.ndarray] = None
    scenario: Optional[Scenario] = None
    # Desired radius for trajectories loaded without their scenario
    desired_radius: Optional[float] = None
    aborted: bool = False
    error: Optional[str] = None
    final_state: Optional[WorldState] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def d_star(self) -> float:
        if self.scenario is not None:
            return self.scenario.controller.d_star
        if self.desired_radius is None:
            raise ValueError("trajectory carries no scenario; desired radius unknown")
        return self.desired_radius

    @property
    def delta(self) -> np.ndarray:
        return self.d - self.d_star

    @property
    def varrho(self) -> np.ndarray:
        return self.d - self.d_hat

    @property
    def x_tilde(self) -> np.ndarray:
        return self.x_hat - self.target

    @property
    def xtilde_norm(self) -> np.ndarray:
        return np.hypot(self.x_tilde[:, 0], self.x_tilde[:, 1])

    @property
    def phi(self) -> np.ndarray:
        diff = self.target - self.agent
        return diff / self.d[:, None]

    @property
    def phi_perp(self) -> np.ndarray:
        phi = self.phi
        return np.column_stack([phi[:, 1], -phi[:, 0]])

    @property
    def sample_interval(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def window(self, start: float, stop: float = math.inf) -> np.ndarray:
        """Boolean mask of samples with start <= t <= stop"""
        return (self.t >= start - 1e-12) & (self.t <= stop + 1e-12)

    def table(self) -> np.ndarray:
        """Rows in CSV column order"""
        xi = self.xi
        return np.column_stack([
            self.t, self.agent, self.target, self.x_hat, xi,
            self.d, self.d_hat, self.delta, self.varrho, self.xtilde_norm,
            self.u, self.theta, self.flags.astype(float),
        ])

    @classmethod
    def from_samples(cls, t, agent, target, x_hat=None, *, scenario=None, **columns) -> "Trajectory":
        """Build a trajectory from position samples; missing columns default to zero"""
        t = np.asarray(t, dtype=float)
        agent = np.asarray(agent, dtype=float)
        target = np.asarray(target, dtype=float)
        if target.ndim == 1:
            target = np.tile(target, (len(t), 1))
        x_hat = target.copy() if x_hat is None else np.asarray(x_hat, dtype=float)
        diff = target - agent
        d = np.hypot(diff[:, 0], diff[:, 1])
        defaults = {
            "xi": x_hat - target,
            "d": d,
            "d_hat": np.hypot(*(x_hat - agent).T),
            "u": np.zeros((len(t), 2)),
            "theta": np.arctan2(diff[:, 1], diff[:, 0]),
            "flags": np.zeros(len(t), dtype=int),
        }
        defaults.update(columns)
        return cls(t=t, agent=agent, target=target, x_hat=x_hat, scenario=scenario, **defaults)
