"""
Fixed-step simulation of the coupled agent, target, estimator and regressor ODEs.

The full state is packed into one flat vector and advanced with classical
RK4. The bearing is a function of the state, so it is recomputed at every
Runge-Kutta stage rather than frozen over a step.
"""
import dataclasses
import logging
import time
from typing import Optional

import numpy as np

from botlc.exceptions import BotlcError, DegenerateGeometry, NonFiniteState
from botlc.methods import BaseMethod, get_method
from botlc.models.schemas import Scenario
from botlc.models.state import Diagnostic, Trajectory, WorldState, WorldTangent
from botlc.services import estimator
from botlc.utils.geometry import bearing
from botlc.utils.integrators import rk4_step

logger = logging.getLogger(__name__)


class SimulationEngine:
    """
    Integrates one scenario with one bound method instance.

    Diagnostic flags raised at any Runge-Kutta stage are accumulated and
    attached to the next recorded sample.
    """

    def __init__(self, scenario: Scenario, method: Optional[BaseMethod] = None):
        self.scenario = scenario
        self.method = method if method is not None else get_method(scenario.method)(scenario)
        self._with_rho = self.method.carries_range
        self._pending = Diagnostic.NONE

    # -- state ---------------------------------------------------------------

    def initial_state(self) -> WorldState:
        state = WorldState.initial(self.scenario, cao_rho=self.method.initial_rho())
        return self.method.project(state)

    def derivative(self, state: WorldState) -> WorldTangent:
        """Time derivative of every state component at `state`"""
        try:
            obs = bearing(state.target, state.agent)
        except DegenerateGeometry as exc:
            raise DegenerateGeometry(exc.distance, t=state.t) from None

        params = self.scenario.estimator
        flags = Diagnostic.NONE
        if estimator.xi_singular(state.regressors, params):
            flags |= Diagnostic.XI_SINGULAR
        xi = estimator.reconstruct_xi(state.regressors, state.x_hat, params)

        target_velocity = self.scenario.target_motion.velocity_at(state.t)
        output = self.method.evaluate(state, obs, target_velocity, xi)
        dP, dq = estimator.regressor_derivative(state.regressors, obs, state.agent)

        return WorldTangent(
            agent=output.u,
            target=target_velocity,
            x_hat=output.x_hat_dot,
            P=dP,
            q=dq,
            cao_rho=output.rho_dot,
            xi=xi,
            output=dataclasses.replace(output, flags=output.flags | flags) if flags else output,
        )

    def _vector_field(self, t: float, z: np.ndarray) -> np.ndarray:
        tangent = self.derivative(WorldState.from_vector(t, z, self._with_rho))
        self._pending |= tangent.output.flags
        return tangent.to_vector()

    def _advance(self, state: WorldState, t_next: float) -> WorldState:
        z = rk4_step(self._vector_field, state.t, state.to_vector(), t_next - state.t)
        if not np.all(np.isfinite(z)):
            raise NonFiniteState(f"state left the finite range at t={t_next:.6g} s")
        return self.method.project(WorldState.from_vector(t_next, z, self._with_rho))

    def step(self, state: WorldState) -> WorldState:
        """One RK4 step of size dt"""
        return self._advance(state, state.t + self.scenario.integrator.dt)

    # -- run -----------------------------------------------------------------

    def run(self) -> Trajectory:
        """
        Integrate from t = 0 to t_end, recording every `record_stride` steps.

        Never raises for geometric or numerical failures: the run stops, and
        the samples recorded so far are returned with `aborted` set.
        """
        integ = self.scenario.integrator
        n_steps, stride = integ.n_steps, integ.record_stride
        recorder = _Recorder(integ.n_samples, self._with_rho)

        logger.info(
            f"🚀 Running '{self.scenario.name}' ({self.method.name}): "
            f"{n_steps} steps of {integ.dt:g} s"
        )
        started = time.perf_counter()
        error: Optional[str] = None
        state = self.initial_state()
        self._pending = Diagnostic.NONE

        try:
            recorder.add(state, self.derivative(state), Diagnostic.NONE)
            for k in range(1, n_steps + 1):
                state = self._advance(state, k * integ.dt)
                if k % stride == 0:
                    tangent = self.derivative(state)
                    recorder.add(state, tangent, self._pending)
                    self._pending = Diagnostic.NONE
        except BotlcError as exc:
            error = str(exc)
            logger.error(f"❌ Run '{self.scenario.name}' aborted: {error}")

        trajectory = recorder.build(self.scenario, state, error)
        elapsed = time.perf_counter() - started
        if error is None:
            logger.info(f"✅ Completed '{self.scenario.name}' in {elapsed:.2f} s ({len(trajectory)} samples)")
        return trajectory


class _Recorder:
    """Preallocated column buffers filled sample by sample"""

    def __init__(self, capacity: int, with_rho: bool):
        self.n = 0
        self.with_rho = with_rho
        self.t = np.empty(capacity)
        self.agent = np.empty((capacity, 2))
        self.target = np.empty((capacity, 2))
        self.x_hat = np.empty((capacity, 2))
        self.xi = np.empty((capacity, 2))
        self.d = np.empty(capacity)
        self.d_hat = np.empty(capacity)
        self.u = np.empty((capacity, 2))
        self.theta = np.empty(capacity)
        self.flags = np.zeros(capacity, dtype=int)
        self.P = np.empty((capacity, 2, 2))
        self.q = np.empty((capacity, 2))
        self.sigma_min = np.empty(capacity)
        self.rho_hat = np.full(capacity, np.nan)

    def add(self, state: WorldState, tangent: WorldTangent, accumulated: Diagnostic) -> None:
        i = self.n
        obs = bearing(state.target, state.agent)
        output = tangent.output
        self.t[i] = state.t
        self.agent[i] = state.agent
        self.target[i] = state.target
        self.x_hat[i] = output.x_hat
        self.xi[i] = tangent.xi
        self.d[i] = obs.distance
        self.d_hat[i] = output.d_hat
        self.u[i] = output.u
        self.theta[i] = obs.theta
        self.flags[i] = int(output.flags | accumulated)
        self.P[i] = state.regressors.P
        self.q[i] = state.regressors.q
        self.sigma_min[i] = state.regressors.sigma_min
        if self.with_rho:
            self.rho_hat[i] = state.cao_rho
        self.n += 1

    def build(self, scenario: Scenario, final_state: WorldState, error: Optional[str]) -> Trajectory:
        n = self.n
        return Trajectory(
            t=self.t[:n].copy(),
            agent=self.agent[:n].copy(),
            target=self.target[:n].copy(),
            x_hat=self.x_hat[:n].copy(),
            xi=self.xi[:n].copy(),
            d=self.d[:n].copy(),
            d_hat=self.d_hat[:n].copy(),
            u=self.u[:n].copy(),
            theta=self.theta[:n].copy(),
            flags=self.flags[:n].copy(),
            P=self.P[:n].copy(),
            q=self.q[:n].copy(),
            sigma_min=self.sigma_min[:n].copy(),
            rho_hat=self.rho_hat[:n].copy(),
            scenario=scenario,
            aborted=error is not None,
            error=error,
            final_state=final_state,
        )


def derivative(state: WorldState, scenario: Scenario) -> WorldTangent:
    return SimulationEngine(scenario).derivative(state)


def step_rk4(state: WorldState, scenario: Scenario) -> WorldState:
    """One RK4 step; raises DegenerateGeometry or NonFiniteState"""
    return SimulationEngine(scenario).step(state)


def run(scenario: Scenario) -> Trajectory:
    return SimulationEngine(scenario).run()
