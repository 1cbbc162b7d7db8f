"""
Shared fixtures: bundled scenarios, long reference runs, harness methods
and synthetic trajectories.
"""
import math
from pathlib import Path

import numpy as np
import pytest

from botlc.methods import ProposedMethod, register_method
from botlc.methods.base_method import BaseMethod
from botlc.models.schemas import Scenario
from botlc.models.state import MethodOutput, Trajectory
from botlc.services import simengine
from botlc.utils.scenario_io import deep_merge, load_scenario, load_scenario_data, scenario_from_dict

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


# ---------------------------------------------------------------------------
# Harness methods
# ---------------------------------------------------------------------------

@register_method
class FrozenEstimateMethod(ProposedMethod):
    """Proposed controller with the estimate held at its initial value"""
    name = "frozen_estimate"
    description = "test harness: estimator switched off"

    def evaluate(self, state, obs, target_velocity, xi) -> MethodOutput:
        output = super().evaluate(state, obs, target_velocity, xi)
        return MethodOutput(u=output.u, x_hat_dot=np.zeros(2), x_hat=state.x_hat, d_hat=output.d_hat)


@register_method
class ZeroInputMethod(BaseMethod):
    """Agent never moves, so the bearing never rotates"""
    name = "zero_input"
    description = "test harness: no excitation"

    def evaluate(self, state, obs, target_velocity, xi) -> MethodOutput:
        return MethodOutput(
            u=np.zeros(2),
            x_hat_dot=np.zeros(2),
            x_hat=state.x_hat,
            d_hat=math.hypot(*(state.x_hat - state.agent)),
        )


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

def make_scenario(base: str = "stationary_proposed", **overrides) -> Scenario:
    """Bundled scenario with nested overrides, e.g. integrator={"t_end_s": 1.0}"""
    data = load_scenario_data(SCENARIO_DIR / f"{base}.toml")
    return scenario_from_dict(deep_merge(data, overrides), base)


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture(scope="session")
def proposed_scenario() -> Scenario:
    return load_scenario(SCENARIO_DIR / "stationary_proposed.toml")


@pytest.fixture(scope="session")
def proposed_run(proposed_scenario) -> Trajectory:
    """Full 5 s run of the stationary reference scenario"""
    return simengine.run(proposed_scenario)


@pytest.fixture(scope="session")
def assumption_run() -> Trajectory:
    return simengine.run(load_scenario(SCENARIO_DIR / "stationary_assumption.toml"))


@pytest.fixture(scope="session")
def short_run() -> Trajectory:
    """First second of the reference scenario"""
    return simengine.run(make_scenario(integrator={"t_end_s": 1.0}))


# ---------------------------------------------------------------------------
# Synthetic trajectories
# ---------------------------------------------------------------------------

def circular_orbit(
    radius: float = 2.0,
    omega: float = 2.5,
    t_end: float = 5.0,
    dt: float = 1e-3,
    target=(0.0, 0.0),
) -> Trajectory:
    """Agent on an exact counter-clockwise circle around a fixed target"""
    t = np.arange(0.0, t_end + 0.5 * dt, dt)
    target = np.asarray(target, dtype=float)
    agent = target + radius * np.column_stack([np.cos(omega * t), np.sin(omega * t)])
    return Trajectory.from_samples(t, agent, target, desired_radius=radius)
