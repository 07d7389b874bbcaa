from .collision import pose_aabb, sweep_first_hit
from .errors import (CollisionError, GraspFault, GripperMismatch, MotionException,
                     RuntimeScriptError, SimError, StateError)
from .simulator import RunResult, SimConfig, Simulator
from .state import Checkpoint, PartState, RobotState, WorkcellState
from .thread import SimulationThread

__all__ = [
    "pose_aabb", "sweep_first_hit", "CollisionError", "GraspFault", "GripperMismatch",
    "MotionException", "RuntimeScriptError", "SimError", "StateError", "RunResult",
    "SimConfig", "Simulator", "Checkpoint", "PartState", "RobotState", "WorkcellState",
    "SimulationThread",
]
