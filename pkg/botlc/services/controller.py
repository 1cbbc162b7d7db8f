"""
Predefined-time circumnavigation law and the estimated distance it uses
"""
import math

from botlc.models.schemas import ControllerParams
from botlc.utils.geometry import BearingObservation, Vec2, sig_pow


def d_hat(x_hat: Vec2, agent: Vec2) -> float:
    """Estimated agent-to-target distance"""
    return math.hypot(x_hat[0] - agent[0], x_hat[1] - agent[1])


def control_saturated(distance_estimate: float, params: ControllerParams) -> bool:
    return abs(distance_estimate - params.d_star) ** params.alpha2 > params.exp_arg_cap


def radial_speed(distance_estimate: float, params: ControllerParams) -> float:
    """Signed speed along the bearing; positive closes the range"""
    error = distance_estimate - params.d_star
    if error == 0.0:
        return 0.0
    gain = math.exp(min(abs(error) ** params.alpha2, params.exp_arg_cap))
    return gain / (params.alpha2 * params.t_c2) * sig_pow(error, 1.0 - params.alpha2)


def control(obs: BearingObservation, distance_estimate: float, params: ControllerParams) -> Vec2:
    """Velocity command: radial correction plus constant tangential speed k_omega"""
    return radial_speed(distance_estimate, params) * obs.phi + params.k_omega * obs.phi_perp


def settling_bound(delta0: float, params: ControllerParams) -> float:
    """Instant at which |delta| reaches zero with an exact distance estimate"""
    return params.t_c2 * (1.0 - math.exp(-(abs(delta0) ** params.alpha2)))

