import math

import numpy as np
import pytest

from botlc.models.schemas import EstimatorParams
from botlc.models.state import RegressorState
from botlc.services import estimator
from botlc.utils.geometry import bearing

PARAMS = EstimatorParams(alpha1=0.5, t_c1=0.2)


def _regressors(P, q) -> RegressorState:
    return RegressorState.from_arrays(np.asarray(P, dtype=float), np.asarray(q, dtype=float))


def test_regressor_derivative_from_zero():
    obs = bearing([1.0, 0.0], [0.0, 0.0])
    agent = np.array([0.0, 0.0])
    dP, dq = estimator.regressor_derivative(RegressorState.zero(), obs, agent)
    np.testing.assert_allclose(dP, [[0.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(dq, [0.0, 0.0])


def test_regressor_derivative_preserves_identity_for_true_target():
    # d/dt (P x - q) = -(P x - q) for a stationary target, so P x = q stays exact
    target = np.array([2.0, 3.0])
    agent = np.array([8.0, 9.0])
    P = np.array([[0.3, 0.1], [0.1, 0.2]])
    q = P @ target
    dP, dq = estimator.regressor_derivative(_regressors(P, q), bearing(target, agent), agent)
    np.testing.assert_allclose(dP @ target - dq, -(P @ target - q), atol=1e-12)


def test_reconstruct_xi_recovers_estimation_error():
    target = np.array([2.0, 3.0])
    P = np.array([[2.0, 0.5], [0.5, 1.0]])
    state = _regressors(P, P @ target)
    x_hat = np.array([5.0, 6.0])
    np.testing.assert_allclose(estimator.reconstruct_xi(state, x_hat, PARAMS), x_hat - target, atol=1e-12)


def test_reconstruct_xi_zero_when_singular():
    state = _regressors([[1.0, 0.0], [0.0, 0.0]], [1.0, 0.0])
    assert estimator.xi_singular(state, PARAMS)
    np.testing.assert_array_equal(estimator.reconstruct_xi(state, np.array([5.0, 6.0]), PARAMS), [0.0, 0.0])


def test_singularity_threshold_applies_to_sigma_min():
    state = _regressors([[1.0, 0.0], [0.0, 1e-9]], [0.0, 0.0])
    assert state.sigma_min == pytest.approx(1e-9)
    assert estimator.xi_singular(state, PARAMS)
    assert not estimator.xi_singular(state, EstimatorParams(singularity_threshold=1e-10))


def test_estimator_derivative_magnitude():
    xi = np.array([3.0, 4.0])
    rate = estimator.estimator_derivative(xi, PARAMS)
    expected = math.exp(math.sqrt(5.0)) / (0.5 * 0.2) * math.sqrt(5.0)
    assert np.linalg.norm(rate) == pytest.approx(expected, rel=1e-12)
    # Antiparallel to xi
    assert rate @ xi == pytest.approx(-np.linalg.norm(rate) * 5.0, rel=1e-12)


def test_estimator_derivative_zero_at_origin():
    np.testing.assert_array_equal(estimator.estimator_derivative(np.zeros(2), PARAMS), [0.0, 0.0])


def test_estimator_exponent_is_capped():
    params = EstimatorParams(alpha1=0.5, t_c1=0.2, exp_arg_cap=2.0)
    xi = np.array([100.0, 0.0])
    assert estimator.estimator_saturated(xi, params)
    assert not estimator.estimator_saturated(xi, PARAMS)
    rate = estimator.estimator_derivative(xi, params)
    assert np.linalg.norm(rate) == pytest.approx(math.exp(2.0) / 0.1 * 10.0, rel=1e-12)


def test_settling_bound_below_predefined_time():
    for r in (1e-3, 0.5, 4.2426, 100.0):
        bound = estimator.settling_bound(r, PARAMS)
        assert 0.0 < bound < PARAMS.t_c1
    assert estimator.settling_bound(100.0, PARAMS) == pytest.approx(0.2 * (1.0 - math.exp(-10.0)))


def test_regressor_state_is_frozen():
    state = RegressorState.zero()
    with pytest.raises(AttributeError):
        state.det = 1.0


def test_unit_exponent_gives_constant_speed_direction():
    params = EstimatorParams(alpha1=1.0, t_c1=0.2)
    xi = np.array([3.0, 4.0])
    rate = estimator.estimator_derivative(xi, params)
    # psi^1 is the unit vector, so only the exponential sets the speed
    np.testing.assert_allclose(rate, -math.exp(5.0) / 0.2 * xi / 5.0, rtol=1e-12)
    assert estimator.settling_bound(5.0, params) == pytest.approx(0.2 * (1.0 - math.exp(-5.0)))
