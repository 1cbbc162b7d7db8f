import math

import numpy as np
import pytest

from botlc.methods import METHODS, BaseMethod, CaoMethod, ProposedMethod, get_method, register_method
from botlc.models.state import Diagnostic, WorldState
from botlc.utils.geometry import bearing
from tests.conftest import make_scenario


def test_builtin_methods_registered():
    assert {"proposed", "deghat", "cao", "chen"} <= set(METHODS)
    assert get_method("proposed") is ProposedMethod
    assert get_method("proposed").predefined_time
    assert not get_method("deghat").predefined_time


def test_unknown_method():
    with pytest.raises(ValueError, match="unknown method"):
        get_method("kalman")


def test_register_requires_name():
    class Nameless(BaseMethod):
        def evaluate(self, state, obs, target_velocity, xi):
            raise NotImplementedError

    with pytest.raises(ValueError):
        register_method(Nameless)


def test_base_method_is_abstract():
    with pytest.raises(TypeError):
        BaseMethod(make_scenario())


def test_proposed_reports_saturation():
    scenario = make_scenario(estimator={"exp_arg_cap": 1.0}, controller={"exp_arg_cap": 1.0})
    method = ProposedMethod(scenario)
    state = WorldState.initial(scenario)
    obs = bearing(state.target, state.agent)
    output = method.evaluate(state, obs, np.zeros(2), state.x_hat - state.target)
    assert Diagnostic.ESTIMATOR_SATURATED in output.flags
    assert Diagnostic.CONTROL_SATURATED in output.flags


def test_cao_initial_range_projects_estimate():
    scenario = make_scenario(method="cao", initial={"x_hat_m": [5.0, 5.0]})
    rho = CaoMethod(scenario).initial_rho()
    obs = bearing([2.0, 3.0], [8.0, 9.0])
    assert rho == pytest.approx(obs.phi @ (np.array([5.0, 5.0]) - np.array([8.0, 9.0])))


def test_cao_initial_range_from_file():
    scenario = make_scenario(method="cao", initial={"rho_hat_m": 3.5})
    assert CaoMethod(scenario).initial_rho() == 3.5


def test_cao_projection_puts_estimate_on_bearing():
    scenario = make_scenario(method="cao")
    method = CaoMethod(scenario)
    state = method.project(WorldState.initial(scenario, cao_rho=method.initial_rho()))
    obs = bearing(state.target, state.agent)
    offset = state.x_hat - state.agent
    assert abs(offset @ obs.phi_perp) < 1e-12
    assert offset @ obs.phi == pytest.approx(state.cao_rho)
    assert state.cao_rho == pytest.approx(3.0 * math.sqrt(2.0))


def test_repr():
    assert repr(ProposedMethod(make_scenario())) == "ProposedMethod(scenario='stationary_proposed')"
