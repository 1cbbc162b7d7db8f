"""
Fixed-step explicit integrators
"""
from typing import Callable

import numpy as np

VectorField = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: VectorField, t: float, z: np.ndarray, h: float) -> np.ndarray:
    """Advance z' = f(t, z) by one classical Runge-Kutta step of size h"""
    k1 = f(t, z)
    k2 = f(t + 0.5 * h, z + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, z + 0.5 * h * k2)
    k4 = f(t + h, z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
