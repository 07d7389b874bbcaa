"""Position-level workcell simulator.

Robots are reduced to a TCP box moving along straight lines inside an
axis-aligned workspace.  Collisions are checked against station boxes,
loose parts and the other robots' TCP boxes.
"""
import json
from dataclasses import dataclass

import numpy as np

from ..errors import UnknownPart
from ..pose import Pose, invert, translation_error
from .collision import pose_aabb, sweep_first_hit
from ..wcs.checker import check
from ..wcs.nodes import Span
from .errors import (CollisionError, GraspFault, GripperMismatch, MotionException,
                     RuntimeScriptError, StateError)
from .interpreter import DEFAULT_STEP_LIMIT, Interpreter, ScriptException
from .state import Checkpoint, PartState, RobotState, WorkcellState


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    detect_sigma: float = 0.0
    grasp_tolerance: float = 0.005
    insert_tolerance: float = 1e-6
    sweep_steps: int = 64
    tcp_half_extent: float = 0.075


class Simulator:
    def __init__(self, workcell, assembly=None, config=None):
        self.workcell = workcell
        self.assembly = assembly
        self.config = config or SimConfig()
        self.events = []  # successful commands since the last clear
        self.output = []  # lines printed by scripts
        self.state = self.initial_state()

    def initial_state(self):
        robots = {
            r.name: RobotState(r.name, r.retract_pose, tuple(r.workspace_min),
                               tuple(r.workspace_max), r.retract_pose)
            for r in self.workcell.robots
        }
        rack = {slot.gripper.name: ("slot", i) for i, slot in enumerate(self.workcell.tool_rack)}
        parts = {n: PartState(n, p) for n, p in self.workcell.initial_part_locations.items()}
        return WorkcellState(robots, rack, parts, tuple(self.workcell.stations),
                             np.random.default_rng(self.config.seed))

    # -- host-side controls --------------------------------------------------

    def checkpoint(self, label=""):
        return Checkpoint.take(self.state, label)

    def restore(self, cp):
        self.state = cp.materialize()
        return self.state

    def state_dict(self):
        return self.state.to_dict()

    def load_state(self, data):
        """Replace the live state with a JSON dump produced by :meth:`dump_state`."""
        try:
            state = self.initial_state()
            state.load_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise StateError(f"state dump does not match this workcell: {exc}") from exc
        self.state = state
        return state

    def summary(self):
        """Short human-readable description of robots and parts."""
        lines = ["robots:"]
        for name, r in sorted(self.state.robots.items()):
            xyz = ", ".join(f"{v:.4f}" for v in r.tcp_pose.translation)
            lines.append(f"  {name}: tcp=[{xyz}] gripper={r.mounted_gripper} held={r.held_part}")
        lines.append("parts:")
        for name, p in sorted(self.state.parts.items()):
            xyz = ", ".join(f"{v:.4f}" for v in p.pose.translation)
            where = f" held by {p.held_by[0]}" if p.held_by else ""
            lines.append(f"  {name}: [{xyz}]{where}")
        lines.append(f"steps: {self.state.step_counter}")
        return "\n".join(lines) + "\n"

    def dump_state(self):
        return json.dumps(self.state.to_dict(), indent=2, sort_keys=True)

    def log(self, op, **fields):
        self.events.append({"op": op, **fields})

    # -- lookups ---------------------------------------------------------------

    def robot(self, name):
        try:
            return self.state.robots[name]
        except (KeyError, TypeError):
            raise StateError(f"unknown robot {name!r}") from None

    def part_name(self, ident):
        """Canonical name of a part given its name or unique description."""
        name = ident
        if self.assembly is not None:
            try:
                name = self.assembly.resolve(ident)
            except UnknownPart as exc:
                raise StateError(f"unknown part {ident!r}") from exc
        if name not in self.state.parts:
            raise StateError(f"unknown part {ident!r}")
        return name

    def holder(self, part):
        """Name of the robot holding ``part``, or None."""
        held = self.part(part).held_by
        return None if held is None else held[0]

    def part(self, ident):
        return self.state.parts[self.part_name(ident)]

    def part_class(self, name):
        if self.assembly is None:
            return None
        return self.assembly.part(name).part_class

    def part_half_extents(self, name):
        if self.assembly is not None and name in self.assembly.names():
            return self.assembly.part(name).half_extents
        return (0.02, 0.02, 0.02)

    def gripper(self, name):
        try:
            return self.workcell.gripper(name)
        except (KeyError, TypeError):
            raise StateError(f"unknown gripper {name!r}") from None

    def station_pose(self, name):
        try:
            return self.workcell.station(name).pose
        except KeyError:
            raise StateError(f"unknown station {name!r}") from None

    def assembly_origin(self):
        """World frame of the assembly: the vise top face composed with the origin frame."""
        vise = next((s for s in self.workcell.stations if s.kind == "vise"), None)
        base = vise.pose if vise is not None else Pose.identity()
        if self.assembly is None:
            return base
        return base @ self.assembly.origin_frame

    def design_pose(self, ident):
        if self.assembly is None:
            raise StateError("no assembly loaded")
        try:
            return self.assembly.part(self.assembly.resolve(ident)).design_pose
        except UnknownPart:
            raise StateError(f"unknown part {ident!r}") from None

    def obstacles(self, moving):
        """(name, lo, hi) boxes the TCP of robot ``moving`` must avoid."""
        out = []
        for s in self.state.stations:
            centre = s.pose.translated(0.0, 0.0, -s.half_extents[2])
            lo, hi = pose_aabb(centre, s.half_extents)
            out.append((s.name, lo, hi))
        for name, p in sorted(self.state.parts.items()):
            if p.held_by is not None and p.held_by[0] == moving:
                continue
            lo, hi = pose_aabb(p.pose, self.part_half_extents(name))
            out.append((name, lo, hi))
        h = self.config.tcp_half_extent
        for name, r in sorted(self.state.robots.items()):
            if name != moving:
                c = r.tcp_pose.translation
                out.append((f"robot_{name}", c - h, c + h))
        return out

    # -- motion ----------------------------------------------------------------

    def move_cartesian(self, robot, target):
        r = self.robot(robot)
        if not isinstance(target, Pose):
            raise StateError("move_cartesian() needs a pose target")
        point = target.translation
        if not r.in_workspace(point):
            coords = ", ".join(f"{v:.3f}" for v in point)
            raise MotionException(
                f"unreachable position [{coords}] for robot {r.name!r}")
        hit = sweep_first_hit(r.tcp_pose.translation, point, self.config.tcp_half_extent,
                              self.obstacles(r.name), self.config.sweep_steps)
        if hit is not None:
            step, body = hit
            raise CollisionError(f"robot_{r.name}", body,
                                 f"at step {step} of {self.config.sweep_steps}")
        r.tcp_pose = target
        if r.held_part is not None:
            part = self.state.parts[r.held_part]
            part.pose = target @ part.held_by[1]
        self.state.step_counter += 1
        self.log("move", robot=r.name)

    def retract(self, robot):
        self.move_cartesian(robot, self.robot(robot).retract_pose)

    # -- tools -----------------------------------------------------------------

    def attach_gripper(self, robot, gripper):
        r = self.robot(robot)
        self.gripper(gripper)
        if r.held_part is not None:
            raise GraspFault(f"cannot change gripper while holding {r.held_part!r}")
        where = self.state.rack[gripper]
        if where == ("robot", r.name):
            return
        if where[0] == "robot":
            raise StateError(f"gripper {gripper!r} is mounted on robot {where[1]!r}")
        if r.mounted_gripper is not None:
            self.state.rack[r.mounted_gripper] = self._home_slot(r.mounted_gripper)
        self.state.rack[gripper] = ("robot", r.name)
        r.mounted_gripper = gripper
        self.state.step_counter += 1
        self.log("attach", robot=r.name, gripper=gripper)

    def _home_slot(self, gripper):
        for i, slot in enumerate(self.workcell.tool_rack):
            if slot.gripper.name == gripper:
                return ("slot", i)
        raise StateError(f"unknown gripper {gripper!r}")

    def grasp_pose(self, robot, part):
        r = self.robot(robot)
        if r.mounted_gripper is None:
            raise StateError(f"robot {r.name!r} has no gripper mounted")
        offset = self.gripper(r.mounted_gripper).grasp_offset
        return self.part(part).pose @ invert(offset)

    def pick(self, robot, part):
        r = self.robot(robot)
        name = self.part_name(part)
        p = self.state.parts[name]
        if r.mounted_gripper is None:
            raise GraspFault(f"robot {r.name!r} has no gripper mounted")
        if r.held_part is not None:
            raise GraspFault(f"robot {r.name!r} is already holding {r.held_part!r}")
        if p.held_by is not None:
            raise GraspFault(f"part {name!r} is held by robot {p.held_by[0]!r}")
        g = self.gripper(r.mounted_gripper)
        cls = self.part_class(name)
        if cls is not None and cls not in g.compatible_classes:
            raise GripperMismatch(
                f"gripper {g.name!r} cannot grasp part {name!r} of class {cls!r}")
        grasp = p.pose @ invert(g.grasp_offset)
        err = translation_error(r.tcp_pose, grasp)
        if err > self.config.grasp_tolerance:
            raise GraspFault(f"not within grasp tolerance of {name!r} ({err * 1000:.1f} mm away)")
        offset = invert(r.tcp_pose) @ p.pose
        p.held_by = (r.name, offset)
        p.pose = r.tcp_pose @ offset
        r.held_part = name
        self.state.step_counter += 1
        self.log("pick", robot=r.name, part=name)

    def tcp_for(self, robot, part_target):
        r = self.robot(robot)
        if r.held_part is None:
            raise StateError(f"robot {r.name!r} is not holding a part")
        return part_target @ invert(self.state.parts[r.held_part].held_by[1])

    def _held(self, r, part):
        name = self.part_name(part)
        if r.held_part != name:
            raise StateError(f"robot {r.name!r} is not holding {name!r}")
        return name

    def _deliver(self, r, name, target):
        p = self.state.parts[name]
        self.move_cartesian(r.name, target @ invert(p.held_by[1]))
        err = translation_error(p.pose, target)
        if err > self.config.insert_tolerance:
            raise MotionException(f"part {name!r} misses its target by {err:.3g} m")
        p.held_by = None
        r.held_part = None

    def place(self, robot, part, target):
        r = self.robot(robot)
        name = self._held(r, part)
        if not isinstance(target, Pose):
            raise StateError("place() needs a pose target")
        self._deliver(r, name, target)
        self.log("place", robot=r.name, part=name)

    def insert(self, robot, part, target_part):
        r = self.robot(robot)
        name = self._held(r, part)
        other = self.part_name(target_part)
        if self.assembly is None or not self.assembly.adjacent(name, other):
            raise StateError(f"{name!r} is not adjacent to {other!r} in the assembly")
        if self.state.parts[other].held_by is not None:
            raise StateError(f"target part {other!r} is held by a robot")
        target = (self.state.parts[other].pose @ invert(self.design_pose(other))
                  @ self.design_pose(name))
        self._deliver(r, name, target)
        self.log("insert", robot=r.name, part=name, target=other)

    # -- sensing ---------------------------------------------------------------

    def detect(self, part):
        name = self.part_name(part)
        pose = self.state.parts[name].pose
        sigma = self.config.detect_sigma
        if sigma > 0:
            noise = self.state.rng.normal(0.0, sigma, 3)
            pose = pose.translated(*noise)
        self.log("detect", part=name)
        return pose

    def random_uniform(self, lo, hi):
        return float(self.state.rng.uniform(lo, hi))

    # -- scripts ---------------------------------------------------------------

    def run_script(self, script, api=None, step_limit=DEFAULT_STEP_LIMIT):
        """Run ``main(workcell)``; on failure roll back and raise RuntimeScriptError."""
        problems = check(script, api)
        if problems:
            raise problems[0]
        entry = self.checkpoint("entry")
        self.events = []
        self.output = []
        try:
            Interpreter(self, script, step_limit=step_limit).run()
        except ScriptException as exc:
            self.restore(entry)
            span = exc.span or Span(1, 1)
            raise RuntimeScriptError(exc.kind, exc.message, span, script.source,
                                     cause=exc.cause or exc) from None
        except BaseException:
            self.restore(entry)
            raise
        return RunResult(list(self.events), list(self.output))


@dataclass(frozen=True)
class RunResult:
    events: list
    output: list
