import math

import numpy as np
import pytest
from pydantic import ValidationError

from botlc.models.schemas import ControllerParams
from botlc.services import controller
from botlc.utils.geometry import bearing

PARAMS = ControllerParams(alpha2=0.5, t_c2=0.4, d_star=2.0, omega_star=2.5)


def test_k_omega_is_derived():
    assert PARAMS.k_omega == pytest.approx(5.0)


def test_k_omega_given_in_file_units():
    params = ControllerParams.model_validate({"d_star_m": 2.0, "k_omega_mps": 5.0})
    assert params.omega_star == pytest.approx(2.5)


def test_conflicting_rates_are_rejected():
    with pytest.raises(ValidationError):
        ControllerParams.model_validate({"d_star_m": 2.0, "k_omega_mps": 5.0, "omega_star_radps": 3.0})


def test_control_reference_value():
    obs = bearing([1.0, 0.0], [0.0, 0.0])
    u = controller.control(obs, 3.0, PARAMS)
    np.testing.assert_allclose(u, [math.e / 0.2, -5.0], rtol=1e-12)
    assert u[0] == pytest.approx(13.5914, abs=1e-4)


def test_control_on_circle_is_purely_tangential():
    obs = bearing([2.0, 3.0], [8.0, 9.0])
    u = controller.control(obs, 2.0, PARAMS)
    assert abs(u @ obs.phi) < 1e-12
    assert np.linalg.norm(u) == pytest.approx(5.0)


def test_radial_speed_sign():
    # Too far: move toward the target; too close: move away
    assert controller.radial_speed(3.0, PARAMS) > 0.0
    assert controller.radial_speed(1.0, PARAMS) < 0.0
    assert controller.radial_speed(1.0, PARAMS) == pytest.approx(-controller.radial_speed(3.0, PARAMS))


def test_d_hat():
    assert controller.d_hat(np.array([5.0, 6.0]), np.array([8.0, 10.0])) == pytest.approx(5.0)


def test_control_exponent_cap():
    params = ControllerParams(alpha2=0.5, t_c2=0.4, d_star=2.0, omega_star=2.5, exp_arg_cap=1.0)
    assert controller.control_saturated(11.0, params)
    assert not controller.control_saturated(11.0, PARAMS)
    expected = math.e / 0.2 * 3.0
    assert controller.radial_speed(11.0, params) == pytest.approx(expected, rel=1e-12)


def test_settling_bound():
    assert controller.settling_bound(-1.5, PARAMS) == controller.settling_bound(1.5, PARAMS)
    assert controller.settling_bound(6.485, PARAMS) < PARAMS.t_c2


def test_unit_exponent_is_a_sign_law():
    params = ControllerParams(alpha2=1.0, t_c2=0.4, d_star=2.0, omega_star=2.5)
    assert controller.radial_speed(3.0, params) == pytest.approx(math.e / 0.4, rel=1e-12)
    assert controller.radial_speed(2.0 - 1e-9, params) == pytest.approx(-1.0 / 0.4, rel=1e-6)
    assert controller.radial_speed(2.0, params) == 0.0
