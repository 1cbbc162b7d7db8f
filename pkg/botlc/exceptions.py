"""
Domain errors raised by the simulation, analysis and scenario layers
"""


class BotlcError(Exception):
    """Base class for all library errors"""


class DegenerateGeometry(BotlcError):
    """Agent and target coincide, so the bearing is undefined"""

    def __init__(self, distance: float, t: float | None = None):
        self.distance = distance
        self.t = t
        where = f" at t={t:.6g} s" if t is not None else ""
        super().__init__(f"agent and target coincide{where} (distance {distance:.3e} m)")


class NonFiniteState(BotlcError):
    """A state component left the finite floating-point range"""


class EmptySeries(BotlcError):
    """An analysis routine received a series without samples"""


class WindowOutOfRange(BotlcError):
    """A requested analysis window is not covered by the trajectory"""


class ScenarioError(BotlcError):
    """A scenario or manifest file could not be read or validated"""


class TrajectoryFormatError(BotlcError):
    """A trajectory CSV does not match the documented column layout"""
