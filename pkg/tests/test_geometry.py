import math

import numpy as np
import pytest

from botlc.exceptions import DegenerateGeometry, NonFiniteState
from botlc.utils.geometry import as_vec2, bearing, cross, psi_pow, sig_pow, unwrap_angles


def test_bearing_reference_geometry():
    obs = bearing([2.0, 3.0], [8.0, 9.0])
    assert obs.phi == pytest.approx([-1 / math.sqrt(2), -1 / math.sqrt(2)], abs=1e-12)
    assert obs.distance == pytest.approx(6.0 * math.sqrt(2.0), rel=1e-12)
    assert obs.theta == pytest.approx(-3.0 * math.pi / 4.0)


def test_bearing_unit_axis():
    obs = bearing([1.0, 0.0], [0.0, 0.0])
    np.testing.assert_allclose(obs.phi, [1.0, 0.0])
    np.testing.assert_allclose(obs.phi_perp, [0.0, -1.0])
    assert obs.theta == 0.0
    assert obs.distance == 1.0


def test_bearing_theta_range_includes_pi():
    obs = bearing([-1.0, 0.0], [0.0, 0.0])
    assert obs.theta == pytest.approx(math.pi)


@pytest.mark.parametrize("separation", [0.0, 1e-13])
def test_bearing_rejects_coincident_points(separation):
    with pytest.raises(DegenerateGeometry):
        bearing([1.0 + separation, 2.0], [1.0, 2.0])


@pytest.mark.parametrize("target", [[math.nan, 0.0], [math.inf, 0.0]])
def test_bearing_rejects_non_finite(target):
    with pytest.raises(NonFiniteState):
        bearing(target, [0.0, 0.0])


def test_bearing_frame_is_orthonormal():
    rng = np.random.default_rng(7)
    for _ in range(200):
        target, agent = rng.uniform(-50.0, 50.0, size=(2, 2))
        obs = bearing(target, agent)
        assert np.linalg.norm(obs.phi) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(obs.phi_perp) == pytest.approx(1.0, abs=1e-12)
        assert abs(obs.phi @ obs.phi_perp) < 1e-12
        # Clockwise quarter turn: phi x phi_perp points into the plane
        assert cross(obs.phi, obs.phi_perp) == pytest.approx(-1.0, abs=1e-12)


def test_bearing_is_translation_invariant():
    shift = np.array([123.4, -56.7])
    a = bearing([2.0, 3.0], [8.0, 9.0])
    b = bearing(np.array([2.0, 3.0]) + shift, np.array([8.0, 9.0]) + shift)
    np.testing.assert_allclose(a.phi, b.phi, atol=1e-12)
    assert a.distance == pytest.approx(b.distance, rel=1e-12)


def test_sig_pow_vector_and_scalar():
    np.testing.assert_allclose(sig_pow(np.array([4.0, -9.0]), 0.5), [2.0, -3.0])
    assert sig_pow(0.0, 0.5) == 0.0
    assert sig_pow(-8.0, 1.0 / 3.0) == pytest.approx(-2.0)
    np.testing.assert_array_equal(sig_pow(np.zeros(2), 0.5), [0.0, 0.0])


def test_sig_pow_is_odd():
    z = np.linspace(-5.0, 5.0, 41)
    np.testing.assert_allclose(sig_pow(-z, 0.7), -sig_pow(z, 0.7))


def test_psi_pow_reference_value():
    np.testing.assert_allclose(psi_pow(np.array([3.0, 4.0]), 0.5), [1.34164079, 1.78885438], rtol=1e-8)
    np.testing.assert_array_equal(psi_pow(np.zeros(2), 0.5), [0.0, 0.0])


def test_psi_pow_norm_identity():
    rng = np.random.default_rng(3)
    for z in rng.normal(scale=10.0, size=(100, 2)):
        for beta in (0.25, 0.5, 1.0):
            expected = np.linalg.norm(z) ** (1.0 - beta)
            assert np.linalg.norm(psi_pow(z, beta)) == pytest.approx(expected, rel=1e-12)


def test_cross_broadcasts():
    a = np.array([1.0, 0.0])
    b = np.array([[0.0, 1.0], [0.0, -2.0], [3.0, 0.0]])
    np.testing.assert_allclose(cross(a, b), [1.0, -2.0, 0.0])


def test_as_vec2_checks_shape_and_finiteness():
    np.testing.assert_array_equal(as_vec2((1, 2)), [1.0, 2.0])
    with pytest.raises(NonFiniteState):
        as_vec2([1.0, math.nan])


def test_unwrap_angles_removes_branch_jumps():
    angles = np.angle(np.exp(1j * np.linspace(0.0, 6.0 * math.pi, 300)))
    unwrapped = unwrap_angles(angles)
    assert np.all(np.diff(unwrapped) > 0.0)
    assert unwrapped[-1] == pytest.approx(6.0 * math.pi, abs=1e-9)
