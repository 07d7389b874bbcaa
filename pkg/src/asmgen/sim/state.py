"""Mutable simulator state and its snapshots."""
import copy
from dataclasses import dataclass, field

import numpy as np

from ..pose import Pose


@dataclass
class RobotState:
    name: str
    tcp_pose: Pose
    workspace_min: tuple
    workspace_max: tuple
    retract_pose: Pose
    mounted_gripper: str | None = None
    held_part: str | None = None

    def in_workspace(self, point):
        return all(lo <= v <= hi for v, lo, hi in
                   zip(point, self.workspace_min, self.workspace_max))


@dataclass
class PartState:
    name: str
    pose: Pose
    held_by: tuple | None = None  # (robot name, grasp offset)


@dataclass
class WorkcellState:
    robots: dict
    rack: dict  # gripper -> ("slot", index) or ("robot", name)
    parts: dict
    stations: tuple
    rng: np.random.Generator
    step_counter: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        """JSON-ready dump; two states are equal when their dumps are."""
        return {
            "robots": {
                n: {"tcp_pose": r.tcp_pose.to_list(), "mounted_gripper": r.mounted_gripper,
                    "held_part": r.held_part}
                for n, r in sorted(self.robots.items())
            },
            "rack": {g: list(loc) for g, loc in sorted(self.rack.items())},
            "parts": {
                n: {"pose": p.pose.to_list(),
                    "held_by": None if p.held_by is None
                    else [p.held_by[0], p.held_by[1].to_list()]}
                for n, p in sorted(self.parts.items())
            },
            "stations": [s.name for s in self.stations],
            "step_counter": self.step_counter,
            "rng": _jsonable(self.rng.bit_generator.state),
        }

    def load_dict(self, data):
        """Overwrite robot, rack, part and RNG state from a :meth:`to_dict` dump."""
        for name, r in data["robots"].items():
            robot = self.robots[name]
            robot.tcp_pose = Pose.from_list(r["tcp_pose"])
            robot.mounted_gripper = r["mounted_gripper"]
            robot.held_part = r["held_part"]
        self.rack = {g: tuple(loc) for g, loc in data["rack"].items()}
        parts = {}
        for name, p in data["parts"].items():
            held = p["held_by"]
            parts[name] = PartState(name, Pose.from_list(p["pose"]),
                                    None if held is None else (held[0], Pose.from_list(held[1])))
        self.parts = parts
        self.step_counter = int(data["step_counter"])
        self.rng.bit_generator.state = data["rng"]
        return self

    def __eq__(self, other):
        if not isinstance(other, WorkcellState):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    return v


@dataclass(frozen=True)
class Checkpoint:
    """Frozen deep copy of a state.  Restoring copies again, so one
    checkpoint can be restored any number of times."""

    label: str
    state: WorkcellState

    @classmethod
    def take(cls, state, label=""):
        return cls(label, copy.deepcopy(state))

    def materialize(self):
        return copy.deepcopy(self.state)
