"""
Comparison estimators and controllers from the bearing-only literature.

Deghat: projection estimator with a linear range controller.
Cao:    scalar range estimate rho_hat along the bearing; needs the bearing rate.
Chen:   finite-time estimator on the same (P, q) regressors as the proposed method.
"""
from botlc.models.state import RegressorState
from botlc.utils.geometry import BearingObservation, Vec2, sig_pow


# Deghat ---------------------------------------------------------------------

def deghat_estimator_derivative(x_hat: Vec2, obs: BearingObservation, agent: Vec2, k_est: float) -> Vec2:
    """k_est (I - phi phi^T)(y - x_hat); always orthogonal to phi"""
    diff = agent - x_hat
    return k_est * (diff - obs.phi * (obs.phi @ diff))


def deghat_control(obs: BearingObservation, d_hat: float, k_alpha: float, k_beta: float, d_star: float) -> Vec2:
    return k_alpha * (d_hat - d_star) * obs.phi + k_beta * obs.phi_perp


# Cao ------------------------------------------------------------------------

def cao_state_derivative(
    rho_hat: float,
    obs: BearingObservation,
    agent_velocity: Vec2,
    bearing_rate: Vec2,
    k_e: float,
) -> float:
    """Range-estimate rate with the estimate's own rate substituted out.

    With x_hat = y + rho_hat*phi, the estimate rate is
    y_dot + rho_hat_dot*phi + rho_hat*phi_dot; its phi_perp component
    does not contain rho_hat_dot since phi_perp^T phi = 0.
    """
    return float(
        -(obs.phi @ agent_velocity)
        + k_e * (obs.phi_perp @ agent_velocity + rho_hat * (obs.phi_perp @ bearing_rate))
    )


def cao_estimate(rho_hat: float, obs: BearingObservation, agent: Vec2) -> Vec2:
    return agent + rho_hat * obs.phi


def cao_control(obs: BearingObservation, rho_hat: float, kappa_alpha: float, kappa_beta: float, d_star: float) -> Vec2:
    return kappa_alpha * (rho_hat - d_star) * obs.phi + kappa_beta * obs.phi_perp


def bearing_rate(obs: BearingObservation, target_velocity: Vec2, agent_velocity: Vec2) -> Vec2:
    """Ground-truth phi_dot = (I - phi phi^T)(x_dot - y_dot)/d"""
    relative = target_velocity - agent_velocity
    return (relative - obs.phi * (obs.phi @ relative)) / obs.distance


# Chen -----------------------------------------------------------------------

def chen_estimator_derivative(
    x_hat: Vec2,
    regressors: RegressorState,
    agent: Vec2,
    kappa_est: float,
    beta1: float,
    residual: str = "q",
) -> Vec2:
    """-kappa_est P^T sig^beta1(P x_hat - r) with r = q (default) or r = y"""
    reference = regressors.q if residual == "q" else agent
    P = regressors.P
    return -kappa_est * (P.T @ sig_pow(P @ x_hat - reference, beta1))


def chen_control(obs: BearingObservation, d_hat: float, k_d: float, k_phi: float, beta2: float, d_star: float) -> Vec2:
    return k_d * sig_pow(d_hat - d_star, beta2) * obs.phi + k_phi * obs.phi_perp

