"""
Predefined-time estimator paired with the predefined-time circumnavigation law
"""
from botlc.methods.base_method import BaseMethod
from botlc.models.state import Diagnostic, MethodOutput
from botlc.services import controller, estimator


class ProposedMethod(BaseMethod):
    name = "proposed"
    description = "predefined-time estimator and circumnavigation controller"
    predefined_time = True

    def evaluate(self, state, obs, target_velocity, xi) -> MethodOutput:
        distance_estimate = controller.d_hat(state.x_hat, state.agent)

        flags = Diagnostic.NONE
        if estimator.estimator_saturated(xi, self.estimator):
            flags |= Diagnostic.ESTIMATOR_SATURATED
        if controller.control_saturated(distance_estimate, self.controller):
            flags |= Diagnostic.CONTROL_SATURATED

        return MethodOutput(
            u=controller.control(obs, distance_estimate, self.controller),
            x_hat_dot=estimator.estimator_derivative(xi, self.estimator),
            x_hat=state.x_hat,
            d_hat=distance_estimate,
            flags=flags,
        )
