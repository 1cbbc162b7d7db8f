"""
End-to-end reproductions on the bundled scenarios.

Reference run: target [2, 3], agent [8, 9], estimate [5, 6], d* = 2 m,
T_c1 = 0.2 s, T_c2 = 0.4 s, alpha1 = alpha2 = 0.5, k_omega = 5 m/s,
dt = 1e-4 s recorded every millisecond.
"""
import numpy as np
import pytest

from botlc.models.schemas import MonitorConfig
from botlc.services import analysis, simengine
from botlc.services.analysis import CheckStatus
from botlc.services.benchmark import run_compare, run_sweep
from botlc.services.task_scheduler import EXIT_OK
from botlc.utils.scenario_io import load_compare_manifest, load_scenario, load_sweep_manifest
from tests.conftest import make_scenario

pytestmark = pytest.mark.slow

DT = 1e-4


@pytest.fixture(scope="module")
def proposed_report(proposed_run):
    return analysis.invariant_report(proposed_run)


@pytest.fixture(scope="module")
def assumption_report(assumption_run):
    return analysis.invariant_report(assumption_run)


def test_reference_run_completes(proposed_run):
    assert not proposed_run.aborted
    assert len(proposed_run) == 5001
    assert proposed_run.t[-1] == pytest.approx(5.0)


def test_estimate_settles_within_predefined_time(proposed_run):
    limit = 0.2 + 2 * DT
    settle = analysis.settling_time(proposed_run.t, proposed_run.xtilde_norm, 1e-3)
    assert settle is not None and settle <= limit
    after = proposed_run.window(limit)
    assert np.all(proposed_run.xtilde_norm[after] <= 1e-3)


def test_tracking_settles_within_predefined_time(proposed_run):
    after = proposed_run.window(0.4 + 2 * DT)
    assert np.max(np.abs(proposed_run.delta[after])) <= 1e-2


def test_angular_rate_reaches_omega_star(proposed_run):
    window = proposed_run.window(1.0, 5.0)
    mean_rate = float(np.mean(analysis.angular_rate(proposed_run)[window]))
    assert mean_rate == pytest.approx(2.5, rel=0.01)


def test_gamma_rate_matches_tangential_speed(proposed_report):
    assert proposed_report.check("gamma_rate").status is CheckStatus.PASS


def test_settling_is_independent_of_initial_offset(tmp_path, scenario_dir):
    manifest, scenarios = load_sweep_manifest(scenario_dir / "estimate_sweep.toml")
    result = run_sweep(manifest, scenarios, tmp_path, emit=frozenset())
    assert result.offsets == [0.1, 1.0, 10.0, 100.0]
    assert result.limit_s == pytest.approx(0.2 + 2e-5)
    assert all(result.passed), result.settling
    assert result.exit_code == EXIT_OK

    # A 1000x larger offset moves the settling time by less than T_c1
    settling = np.array(result.settling)
    assert settling.max() - settling.min() < 0.2
    assert settling.max() / settling.min() < 10.0
    # Settling follows T_c1 (1 - exp(-r^alpha1)), which rises with r but never reaches T_c1
    assert np.all(np.diff(settling) >= 0.0)
    assert result.correlation > 0.0
    assert (tmp_path / "sweep.csv").exists()


def test_proposed_method_settles_first(tmp_path, scenario_dir):
    manifest_path = tmp_path / "comparison.toml"
    manifest_path.write_text(
        f'base = "{(scenario_dir / "stationary_proposed.toml").as_posix()}"\n'
        'methods = ["proposed", "deghat", "cao", "chen"]\n'
        'settle_threshold_m = 1e-2\n'
        '[overrides.integrator]\n'
        't_end_s = 1.0\n'
    )
    manifest, scenarios = load_compare_manifest(manifest_path)
    result = run_compare(manifest, scenarios, tmp_path / "out", emit=frozenset())

    settle = {row["label"]: row["estimate_settling_s"] for row in result.rows}
    proposed = settle.pop("proposed")
    assert proposed is not None and proposed <= 0.2
    for label, value in settle.items():
        assert value is None or value > proposed, label
    for label in ("deghat", "chen"):
        assert settle[label] is None or settle[label] > 0.2, label
    assert (tmp_path / "out" / "summary.csv").exists()


@pytest.mark.parametrize("run", ["proposed", "assumption"])
def test_invariant_suite(run, proposed_report, assumption_report):
    report = proposed_report if run == "proposed" else assumption_report
    for name in ("regressor_identity", "reconstruction", "estimate_monotone"):
        assert report.check(name).status is CheckStatus.PASS, report.check(name)


def test_distance_stays_in_invariant_set(assumption_report, assumption_run):
    check = assumption_report.check("distance_bounds")
    assert check.status is CheckStatus.PASS, check
    config = MonitorConfig.for_scenario(assumption_run.scenario)
    assert np.min(assumption_run.d) >= config.d_min


def test_distance_bounds_skipped_without_assumption(proposed_report):
    assert proposed_report.check("distance_bounds").status is CheckStatus.SKIPPED


@pytest.mark.parametrize("name", ["lyapunov_v1", "lyapunov_v2"])
def test_lyapunov_decay(name, proposed_report):
    check = proposed_report.check(name)
    assert check.status is CheckStatus.PASS, check


def test_lyapunov_residual_medians(proposed_run, proposed_scenario):
    residuals = analysis.lyapunov_decay_check(proposed_run, MonitorConfig.for_scenario(proposed_scenario))
    assert residuals.v1_residual.size > 50
    assert residuals.v2_residual.size > 50
    assert residuals.v1_median <= 0.01
    assert residuals.v2_median <= 0.01


def test_excitation_after_convergence(proposed_report):
    check = proposed_report.check("pe_certificate")
    assert check.status is CheckStatus.PASS
    assert proposed_report.metrics["pe_lambda_min"] > 0.1


def test_integrator_is_fourth_order():
    # The switched estimator makes d(t) non-smooth; the linear baseline on the
    # same geometry exercises the integrator alone
    result = analysis.step_halving(make_scenario(method="deghat"), t_end=0.1, dt=1e-2)
    assert result.ratio >= 8.0


def test_drifting_target_stays_in_small_neighbourhood(scenario_dir):
    trajectory = simengine.run(load_scenario(scenario_dir / "arena_drifting.toml"))
    assert not trajectory.aborted
    window = trajectory.window(10.0, 60.0)
    # Regression anchor for the decaying drift profile
    assert np.max(trajectory.xtilde_norm[window]) <= 0.05
    assert np.max(np.abs(trajectory.delta[window])) <= 0.05


def test_arena_stationary(scenario_dir):
    trajectory = simengine.run(load_scenario(scenario_dir / "arena_stationary.toml"))
    report = analysis.invariant_report(trajectory)
    for name in (
        "regressor_identity", "reconstruction", "estimate_settling",
        "tracking_settling", "angular_rate", "pe_certificate",
    ):
        assert report.check(name).status is CheckStatus.PASS, report.check(name)


def test_monitors_flag_broken_methods():
    frozen = analysis.invariant_report(simengine.run(make_scenario(
        method="frozen_estimate", integrator={"t_end_s": 1.0},
    )))
    assert frozen.check("reconstruction").status is CheckStatus.PASS
    assert frozen.check("estimate_settling").status is CheckStatus.FAIL

    still = analysis.invariant_report(simengine.run(make_scenario(
        method="zero_input", integrator={"t_end_s": 3.0, "dt_s": 1e-3},
    )))
    assert still.check("pe_certificate").status is CheckStatus.FAIL
    assert not still.passed


def test_sign_law_chatter_is_bounded():
    # alpha2 = 1 makes the radial law sign(d_tilde)/T_c2 near the orbit, so the
    # fixed-step radius dithers by about dt/T_c2 = 2.5e-4 m per step
    trajectory = simengine.run(make_scenario(controller={"alpha2": 1.0}, integrator={"t_end_s": 1.5}))
    assert not trajectory.aborted
    chatter = float(np.max(np.abs(trajectory.delta[trajectory.window(1.0)])))
    assert chatter <= 5e-3
