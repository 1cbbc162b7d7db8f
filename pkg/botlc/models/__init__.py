"""
Data models: pydantic schemas and simulation value types
"""
from botlc.models.schemas import (
    Scenario,
    EstimatorParams,
    ControllerParams,
    BaselineParams,
    TargetMotion,
    InitialConditions,
    IntegratorSettings,
    MonitorConfig,
    PEWindowConfig,
)
from botlc.models.state import Diagnostic, RegressorState, WorldState, Trajectory

__all__ = [
    'Scenario',
    'EstimatorParams',
    'ControllerParams',
    'BaselineParams',
    'TargetMotion',
    'InitialConditions',
    'IntegratorSettings',
    'MonitorConfig',
    'PEWindowConfig',
    'Diagnostic',
    'RegressorState',
    'WorldState',
    'Trajectory',
]
