from abc import ABC, abstractmethod
from typing import Optional

from botlc.models.schemas import Scenario
from botlc.models.state import MethodOutput, WorldState
from botlc.utils.geometry import BearingObservation, Vec2


class BaseMethod(ABC):
    """Abstract base class for all estimator/controller pairs"""

    name: str = ""
    description: str = ""
    # True for methods that integrate a scalar range estimate
    carries_range: bool = False
    # True for methods whose errors settle within the configured T_c1, T_c2
    predefined_time: bool = False

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.estimator = scenario.estimator
        self.controller = scenario.controller
        self.gains = scenario.baselines

    @abstractmethod
    def evaluate(
        self,
        state: WorldState,
        obs: BearingObservation,
        target_velocity: Vec2,
        xi: Vec2,
    ) -> MethodOutput:
        """Velocity command and estimator rates at one state"""

    def initial_rho(self) -> Optional[float]:
        return None

    def project(self, state: WorldState) -> WorldState:
        """Algebraic constraint applied after every completed step"""
        return state

    def __repr__(self) -> str:
        return f"{type(self).__name__}(scenario={self.scenario.name!r})"
