"""
Predefined-time target estimator.

The regressor pair (P, q) filters the outer products of the perpendicular
bearing with unit decay rate. For a stationary target P(t)x = q(t) holds
identically, so the reconstructed error xi = P^-1 (P x_hat - q) equals the
true estimation error x_hat - x as soon as P is invertible, without the
target position ever being known.
"""
import math

import numpy as np

from botlc.models.schemas import EstimatorParams
from botlc.models.state import RegressorState
from botlc.utils.geometry import BearingObservation, Vec2, norm, psi_pow


def regressor_derivative(state: RegressorState, obs: BearingObservation, agent: Vec2):
    """Time derivative (dP, dq) of the regressor filters"""
    outer = np.outer(obs.phi_perp, obs.phi_perp)
    dP = outer - state.P
    dq = obs.phi_perp * (obs.phi_perp @ agent) - state.q
    return dP, dq


def xi_singular(state: RegressorState, params: EstimatorParams) -> bool:
    """True when P is too poorly conditioned to be inverted"""
    return state.sigma_min < params.singularity_threshold


def reconstruct_xi(state: RegressorState, x_hat: Vec2, params: EstimatorParams) -> Vec2:
    """Reconstructed estimation error P^-1 (P x_hat - q); zero while P is near-singular"""
    if xi_singular(state, params):
        return np.zeros(2)
    P = state.P
    r = P @ x_hat - state.q
    # Adjugate solve of the 2x2 system
    return np.array([
        P[1, 1] * r[0] - P[0, 1] * r[1],
        P[0, 0] * r[1] - P[1, 0] * r[0],
    ]) / state.det


def estimator_saturated(xi: Vec2, params: EstimatorParams) -> bool:
    return norm(xi) ** params.alpha1 > params.exp_arg_cap


def estimator_derivative(xi: Vec2, params: EstimatorParams) -> Vec2:
    """Estimator vector field, antiparallel to xi"""
    magnitude = norm(xi)
    if magnitude == 0.0:
        return np.zeros(2)
    gain = math.exp(min(magnitude ** params.alpha1, params.exp_arg_cap))
    return -(gain / (params.alpha1 * params.t_c1)) * psi_pow(xi, params.alpha1)


def settling_bound(x_tilde0: float, params: EstimatorParams) -> float:
    """Instant at which ||x_tilde|| reaches zero once the estimator is active"""
    return params.t_c1 * (1.0 - math.exp(-(x_tilde0 ** params.alpha1)))
