"""
Projection estimator with a range-proportional controller (Deghat et al.)
"""
from botlc.methods.base_method import BaseMethod
from botlc.models.state import MethodOutput
from botlc.services import baselines
from botlc.services.controller import d_hat


class DeghatMethod(BaseMethod):
    name = "deghat"
    description = "projection estimator, linear range controller"

    def evaluate(self, state, obs, target_velocity, xi) -> MethodOutput:
        g = self.gains
        distance_estimate = d_hat(state.x_hat, state.agent)
        return MethodOutput(
            u=baselines.deghat_control(obs, distance_estimate, g.k_alpha, g.k_beta, self.controller.d_star),
            x_hat_dot=baselines.deghat_estimator_derivative(state.x_hat, obs, state.agent, g.k_est),
            x_hat=state.x_hat,
            d_hat=distance_estimate,
        )
