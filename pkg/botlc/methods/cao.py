"""
Range estimator along the bearing (Cao et al.)

The estimate is algebraic, x_hat = y + rho_hat * phi, so the integrated
state is the scalar rho_hat; x_hat is re-derived after every step.
"""
import dataclasses
from typing import Optional

from botlc.methods.base_method import BaseMethod
from botlc.models.state import MethodOutput, WorldState
from botlc.services import baselines
from botlc.utils.geometry import as_vec2, bearing


class CaoMethod(BaseMethod):
    name = "cao"
    description = "bearing-rate range estimator, linear range controller"
    carries_range = True

    def initial_rho(self) -> Optional[float]:
        init = self.scenario.initial
        if init.rho_hat is not None:
            return init.rho_hat
        # Projection of the initial estimate onto the initial bearing
        obs = bearing(init.target, init.agent)
        return float(obs.phi @ (as_vec2(init.x_hat) - as_vec2(init.agent)))

    def evaluate(self, state, obs, target_velocity, xi) -> MethodOutput:
        g = self.gains
        rho = state.cao_rho
        u = baselines.cao_control(obs, rho, g.kappa_alpha, g.kappa_beta, self.controller.d_star)
        # The agent velocity is the command itself
        phi_dot = baselines.bearing_rate(obs, target_velocity, u)
        rho_dot = baselines.cao_state_derivative(rho, obs, u, phi_dot, g.k_e)
        return MethodOutput(
            u=u,
            x_hat_dot=u + rho_dot * obs.phi + rho * phi_dot,
            x_hat=baselines.cao_estimate(rho, obs, state.agent),
            d_hat=rho,
            rho_dot=rho_dot,
        )

    def project(self, state: WorldState) -> WorldState:
        obs = bearing(state.target, state.agent)
        return dataclasses.replace(state, x_hat=baselines.cao_estimate(state.cao_rho, obs, state.agent))
