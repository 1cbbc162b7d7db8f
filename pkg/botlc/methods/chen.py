"""
Finite-time estimator on the filtered regressors (Chen et al.)
"""
from botlc.methods.base_method import BaseMethod
from botlc.models.state import MethodOutput
from botlc.services import baselines
from botlc.services.controller import d_hat


class ChenMethod(BaseMethod):
    name = "chen"
    description = "finite-time regressor estimator, sig-power range controller"

    def evaluate(self, state, obs, target_velocity, xi) -> MethodOutput:
        g = self.gains
        distance_estimate = d_hat(state.x_hat, state.agent)
        x_hat_dot = baselines.chen_estimator_derivative(
            state.x_hat, state.regressors, state.agent, g.kappa_est, g.beta1, residual=g.chen_residual,
        )
        u = baselines.chen_control(obs, distance_estimate, g.k_d, g.k_phi, g.beta2, self.controller.d_star)
        return MethodOutput(u=u, x_hat_dot=x_hat_dot, x_hat=state.x_hat, d_hat=distance_estimate)
