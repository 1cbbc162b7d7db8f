"""
Planar vector algebra and bearing geometry.

Vectors are numpy float64 arrays of shape (2,). The bearing `phi` points
from the agent to the target; `phi_perp` is `phi` rotated clockwise by a
quarter turn, so that (phi, phi_perp) is an orthonormal pair by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from botlc.exceptions import DegenerateGeometry, NonFiniteState

# Below this separation the bearing is treated as undefined (collision).
COINCIDENCE_THRESHOLD_M = 1e-12

Vec2 = np.ndarray


def as_vec2(value) -> Vec2:
    """Convert to a finite float64 2-vector"""
    vec = np.asarray(value, dtype=float).reshape(2)
    if not np.all(np.isfinite(vec)):
        raise NonFiniteState(f"non-finite vector {vec!r}")
    return vec


def norm(z: Vec2) -> float:
    return math.hypot(z[0], z[1])


def cross(a, b):
    """z-component of the planar cross product a × b; broadcasts over leading axes"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def perp_clockwise(v: Vec2) -> Vec2:
    return np.array([v[1], -v[0]])


@dataclass(frozen=True, slots=True)
class BearingObservation:
    """Bearing to the target at one instant"""
    phi: Vec2
    phi_perp: Vec2
    theta: float
    # Ground truth, only the simulator and analysis layer may read it
    distance: float


def bearing(target: Vec2, agent: Vec2) -> BearingObservation:
    """Unit bearing from `agent` to `target`"""
    diff = np.asarray(target, dtype=float) - np.asarray(agent, dtype=float)
    distance = math.hypot(diff[0], diff[1])
    if not math.isfinite(distance):
        raise NonFiniteState(f"non-finite positions: target={target!r}, agent={agent!r}")
    if distance < COINCIDENCE_THRESHOLD_M:
        raise DegenerateGeometry(distance)

    phi = diff / distance
    return BearingObservation(
        phi=phi,
        phi_perp=perp_clockwise(phi),
        theta=math.atan2(phi[1], phi[0]),
        distance=distance,
    )


def sig_pow(z, alpha: float):
    """Componentwise sign(z)|z|^alpha; scalars in, scalars out"""
    if np.ndim(z) == 0:
        z = float(z)
        if z == 0.0:
            return 0.0
        return math.copysign(abs(z) ** alpha, z)
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.abs(z) ** alpha


def psi_pow(z: Vec2, beta: float) -> Vec2:
    """z/||z||^beta, and the zero vector at z = 0"""
    magnitude = norm(z)
    if magnitude == 0.0:
        return np.zeros(2)
    return np.asarray(z, dtype=float) / magnitude ** beta


def unwrap_angles(angles) -> np.ndarray:
    """Nearest-branch continuation of an angle series"""
    return np.unwrap(np.asarray(angles, dtype=float))
