"""Tree-walking interpreter for checked WCS scripts.

Numbers are floats.  API errors from the simulator and runtime faults
become catchable script exceptions; the step and call-depth limits are not
catchable and always abort the run.
"""
import math
import sys

from ..pose import Pose, invert
from ..wcs import nodes as N
from .errors import SimError

DEFAULT_STEP_LIMIT = 1_000_000
MAX_CALL_DEPTH = 20


class ScriptException(Exception):
    """An exception raised inside a running script."""

    def __init__(self, kind, message, cause=None):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.span = None
        self.cause = cause


class LimitExceeded(ScriptException):
    """Not catchable by script handlers."""


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class ErrorValue:
    """What an ``except ... as e`` alias is bound to."""

    def __init__(self, kind, message):
        self.kind = kind
        self.message = message

    def __str__(self):
        return f"{self.kind}: {self.message}"


class WorkcellHandle:
    """The ``workcell`` object handed to ``main``."""

    type_name = "workcell"

    def __init__(self, sim):
        self._sim = sim

    def get_robot(self, name):
        _need_str(name, "get_robot")
        self._sim.robot(name)
        return RobotHandle(self._sim, name)

    def detect(self, part):
        _need_str(part, "detect")
        return self._sim.detect(part)

    def design_pose(self, part):
        _need_str(part, "design_pose")
        return self._sim.design_pose(part)

    def assembly_origin(self):
        return self._sim.assembly_origin()

    def station_pose(self, station):
        _need_str(station, "station_pose")
        return self._sim.station_pose(station)

    def gripper_names(self):
        return [g.name for g in self._sim.workcell.grippers()]

    def translation(self, x, y, z):
        return Pose.from_translation(*_numbers("translation", x, y, z))

    def pose(self, x, y, z, roll, pitch, yaw):
        return Pose.from_xyz_rpy(*_numbers("pose", x, y, z, roll, pitch, yaw))

    def identity(self):
        return Pose.identity()

    def invert(self, pose):
        return invert(_need_pose(pose, "invert"))


class RobotHandle:
    type_name = "robot"

    def __init__(self, sim, name):
        self._sim = sim
        self.name = name

    @property
    def tcp_pose(self):
        return self._sim.robot(self.name).tcp_pose

    @property
    def retract_pose(self):
        return self._sim.robot(self.name).retract_pose

    @property
    def mounted_gripper(self):
        return self._sim.robot(self.name).mounted_gripper

    @property
    def held_part(self):
        return self._sim.robot(self.name).held_part

    def move_cartesian(self, target):
        self._sim.move_cartesian(self.name, _need_pose(target, "move_cartesian"))

    def attach_gripper(self, gripper):
        _need_str(gripper, "attach_gripper")
        self._sim.attach_gripper(self.name, gripper)

    def grasp_pose(self, part):
        _need_str(part, "grasp_pose")
        return self._sim.grasp_pose(self.name, part)

    def pick(self, part):
        _need_str(part, "pick")
        self._sim.pick(self.name, part)

    def tcp_for(self, part_target):
        return self._sim.tcp_for(self.name, _need_pose(part_target, "tcp_for"))

    def place(self, part, target):
        _need_str(part, "place")
        self._sim.place(self.name, part, _need_pose(target, "place"))

    def insert(self, part, target_part):
        _need_str(part, "insert")
        _need_str(target_part, "insert")
        self._sim.insert(self.name, part, target_part)

    def retract(self):
        self._sim.retract(self.name)


class PoseMethods:
    """Script-visible methods and attributes of a pose value."""

    @staticmethod
    def translated(p, dx, dy, dz):
        return p.translated(*_numbers("translated", dx, dy, dz))

    @staticmethod
    def inverse(p):
        return invert(p)

    @staticmethod
    def attribute(p, name):
        if name == "translation":
            return [float(v) for v in p.translation]
        return getattr(p, name)


def _type_error(message):
    return ScriptException("TypeError", message)


def _need_str(v, fn):
    if not isinstance(v, str):
        raise _type_error(f"{fn}() expects a string, got {type_name(v)}")


def _need_pose(v, fn):
    if not isinstance(v, Pose):
        raise _type_error(f"{fn}() expects a pose, got {type_name(v)}")
    return v


def _numbers(fn, *values):
    for v in values:
        if isinstance(v, bool) or not isinstance(v, float):
            raise _type_error(f"{fn}() expects numbers, got {type_name(v)}")
    return values


def type_name(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, float):
        return "number"
    if isinstance(v, str):
        return "string"
    if isinstance(v, (list, range)):
        return "list"
    if isinstance(v, Pose):
        return "pose"
    if isinstance(v, ErrorValue):
        return "error"
    return getattr(v, "type_name", type(v).__name__)


def _truthy(v):
    if isinstance(v, Pose):
        return True
    return bool(v)


def _int_index(v, fn):
    if isinstance(v, bool) or not isinstance(v, float) or not v.is_integer():
        raise _type_error(f"{fn} needs a whole number, got {_show(v)}")
    return int(v)


def _show(v):
    if isinstance(v, float):
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    if isinstance(v, bool):
        return "True" if v else "False"
    if v is None:
        return "None"
    if isinstance(v, (list, range)):
        return "[" + ", ".join(_show(_elem(x)) for x in v) + "]"
    if isinstance(v, Pose):
        return repr(v)
    if isinstance(v, RobotHandle):
        return f"<robot {v.name}>"
    if isinstance(v, WorkcellHandle):
        return "<workcell>"
    return str(v)


def _elem(x):
    return float(x) if isinstance(x, int) and not isinstance(x, bool) else x


class Interpreter:
    def __init__(self, sim, script, step_limit=DEFAULT_STEP_LIMIT, max_call_depth=MAX_CALL_DEPTH):
        self.sim = sim
        self.script = script
        self.functions = {f.name: f for f in script.functions}
        self.step_limit = step_limit
        self.max_call_depth = max_call_depth
        self.steps = 0
        self.depth = 0
        self.handling = []  # exceptions being handled, for bare raise

    def run(self):
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 12000))
        try:
            return self.call_function("main", [WorkcellHandle(self.sim)])
        finally:
            sys.setrecursionlimit(old)

    # -- statements --------------------------------------------------------------

    def call_function(self, name, args):
        f = self.functions[name]
        if self.depth >= self.max_call_depth:
            raise LimitExceeded("RecursionError", f"call depth exceeds {self.max_call_depth}")
        env = dict(zip(f.params, args))
        self.depth += 1
        try:
            self.exec_block(f.body, env)
        except _Return as r:
            return r.value
        finally:
            self.depth -= 1
        return None

    def exec_block(self, body, env):
        for stmt in body:
            if not isinstance(stmt, N.Comment):
                self.exec_stmt(stmt, env)

    def exec_stmt(self, s, env):
        self.steps += 1
        if self.steps > self.step_limit:
            exc = LimitExceeded("StepLimitExceeded",
                                f"script exceeded {self.step_limit} steps")
            exc.span = s.span
            raise exc
        try:
            self._exec(s, env)
        except ScriptException as exc:
            if exc.span is None:
                exc.span = s.span
            raise
        except RecursionError:
            exc = LimitExceeded("RecursionError", "script nesting too deep")
            exc.span = s.span
            raise exc from None

    def _exec(self, s, env):
        if isinstance(s, (N.Let, N.Assign)):
            env[s.name] = self.eval(s.value, env)
        elif isinstance(s, N.ExprCall):
            self.eval(s.call, env)
        elif isinstance(s, N.Print):
            self.sim.output.append(" ".join(_show(self.eval(a, env)) for a in s.args))
        elif isinstance(s, N.Pass):
            pass
        elif isinstance(s, N.Return):
            raise _Return(None if s.value is None else self.eval(s.value, env))
        elif isinstance(s, N.Raise):
            self.exec_raise(s, env)
        elif isinstance(s, N.If):
            for cond, body in s.branches:
                if _truthy(self.eval(cond, env)):
                    self.exec_block(body, env)
                    return
            if s.orelse is not None:
                self.exec_block(s.orelse, env)
        elif isinstance(s, N.For):
            seq = self.eval(s.iterable, env)
            if not isinstance(seq, (list, range, str)):
                raise _type_error(f"cannot iterate over {type_name(seq)}")
            for item in seq:
                env[s.var] = _elem(item)
                self.exec_block(s.body, env)
        elif isinstance(s, N.TryExcept):
            self.exec_try(s, env)
        else:
            raise ScriptException("TypeError", f"unsupported statement {type(s).__name__}")

    def exec_raise(self, s, env):
        if s.exc is None:
            raise self.handling[-1]
        if isinstance(s.exc, N.Call) and isinstance(s.exc.func, N.Name) \
                and s.exc.func.id not in env:
            msg = _show(self.eval(s.exc.args[0], env)) if s.exc.args else ""
            raise ScriptException(s.exc.func.id, msg)
        value = self.eval(s.exc, env)
        if isinstance(value, ErrorValue):
            raise ScriptException(value.kind, value.message)
        raise _type_error(f"cannot raise a {type_name(value)}")

    def exec_try(self, s, env):
        try:
            self.exec_block(s.body, env)
        except LimitExceeded:
            raise
        except ScriptException as exc:
            for h in s.handlers:
                if h.exc_name in (None, "Exception") or h.exc_name == exc.kind:
                    if h.alias:
                        env[h.alias] = ErrorValue(exc.kind, exc.message)
                    exc.span = None  # a re-raise reports the raise statement
                    self.handling.append(exc)
                    try:
                        self.exec_block(h.body, env)
                    finally:
                        self.handling.pop()
                    return
            raise

    # -- expressions -------------------------------------------------------------

    def eval(self, e, env):
        if isinstance(e, N.Number):
            return float(e.value)
        if isinstance(e, (N.String, N.Const)):
            return e.value
        if isinstance(e, N.Name):
            if e.id in env:
                return env[e.id]
            raise ScriptException("NameError", f"name {e.id!r} is not bound")
        if isinstance(e, N.ListLit):
            return [self.eval(i, env) for i in e.items]
        if isinstance(e, N.Attribute):
            return self.attribute(self.eval(e.obj, env), e.attr)
        if isinstance(e, N.Call):
            return self.call(e, env)
        if isinstance(e, N.Index):
            return self.index(self.eval(e.obj, env), self.eval(e.index, env))
        if isinstance(e, N.BoolOp):
            left = self.eval(e.left, env)
            if e.op == "and":
                return self.eval(e.right, env) if _truthy(left) else left
            return left if _truthy(left) else self.eval(e.right, env)
        if isinstance(e, N.UnaryOp):
            v = self.eval(e.operand, env)
            if e.op == "not":
                return not _truthy(v)
            if isinstance(v, bool) or not isinstance(v, float):
                raise _type_error(f"cannot negate {type_name(v)}")
            return -v
        if isinstance(e, N.BinOp):
            return self.binop(e.op, self.eval(e.left, env), self.eval(e.right, env))
        if isinstance(e, N.Compare):
            return self.compare(e.op, self.eval(e.left, env), self.eval(e.right, env))
        raise _type_error(f"unsupported expression {type(e).__name__}")

    def attribute(self, obj, name):
        tname = type_name(obj)
        if not self.sim_api_has(tname, name, attribute=True):
            raise _type_error(f"{tname} has no attribute {name!r}")
        if isinstance(obj, Pose):
            return PoseMethods.attribute(obj, name)
        return self._guard(lambda: getattr(obj, name))

    def sim_api_has(self, tname, name, attribute):
        from ..wcs.checker import default_catalog
        api = default_catalog()
        return api.has_attribute(tname, name) if attribute else api.has_method(tname, name)

    def call(self, e, env):
        f = e.func
        if isinstance(f, N.Attribute):
            obj = self.eval(f.obj, env)
            args = [self.eval(a, env) for a in e.args]
            tname = type_name(obj)
            if not self.sim_api_has(tname, f.attr, attribute=False):
                raise _type_error(f"{tname} has no method {f.attr!r}")
            if isinstance(obj, Pose):
                method = getattr(PoseMethods, f.attr)
                return self._guard(lambda: method(obj, *args))
            return self._guard(lambda: getattr(obj, f.attr)(*args))
        name = f.id
        args = [self.eval(a, env) for a in e.args]
        if name in self.functions and name not in env:
            return self.call_function(name, args)
        if name == "range":
            ints = [_int_index(a, "range()") for a in args]
            if len(ints) == 3 and ints[2] == 0:
                raise ScriptException("ValueError", "range() step must not be zero")
            return range(*ints)
        if name == "len":
            if not isinstance(args[0], (list, range, str)):
                raise _type_error(f"len() of a {type_name(args[0])}")
            return float(len(args[0]))
        if name == "random_uniform":
            lo, hi = _numbers("random_uniform", *args)
            return self.sim.random_uniform(lo, hi)
        raise _type_error(f"{name!r} is not callable")

    def _guard(self, fn):
        try:
            return fn()
        except SimError as exc:
            raise ScriptException(exc.kind, exc.message, cause=exc) from exc
        except (OverflowError, ValueError) as exc:
            raise ScriptException("ValueError", str(exc), cause=exc) from exc

    def index(self, obj, idx):
        if not isinstance(obj, (list, range, str)):
            raise _type_error(f"cannot index a {type_name(obj)}")
        i = _int_index(idx, "index")
        if not -len(obj) <= i < len(obj):
            raise ScriptException("IndexError", f"index {i} out of range for length {len(obj)}")
        return _elem(obj[i])

    def binop(self, op, a, b):
        num = (isinstance(a, float) and isinstance(b, float)
               and not isinstance(a, bool) and not isinstance(b, bool))
        if op == "@":
            if isinstance(a, Pose) and isinstance(b, Pose):
                return a @ b
            raise _type_error(f"'@' needs two poses, got {type_name(a)} and {type_name(b)}")
        if op == "+":
            if num:
                return a + b
            if isinstance(a, str) and isinstance(b, str):
                if len(a) + len(b) > self.step_limit:
                    raise ScriptException("ValueError", "string too long")
                return a + b
            if isinstance(a, (list, range)) and isinstance(b, (list, range)):
                if len(a) + len(b) > self.step_limit:
                    raise ScriptException("ValueError", "list too long")
                return [_elem(x) for x in a] + [_elem(x) for x in b]
        elif num:
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if b == 0:
                    raise ScriptException("ZeroDivisionError", "division by zero")
                return a / b
        raise _type_error(f"unsupported operand types for {op}: {type_name(a)} and {type_name(b)}")

    def compare(self, op, a, b):
        if op == "==":
            return _equal(a, b)
        if op == "!=":
            return not _equal(a, b)
        ok = ((isinstance(a, float) and isinstance(b, float)
               and not isinstance(a, bool) and not isinstance(b, bool))
              or (isinstance(a, str) and isinstance(b, str)))
        if not ok:
            raise _type_error(f"cannot compare {type_name(a)} and {type_name(b)} with {op}")
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _equal(a, b):
    if type_name(a) != type_name(b):
        return False
    if isinstance(a, (list, range)):
        return len(a) == len(b) and all(_equal(_elem(x), _elem(y)) for x, y in zip(a, b))
    if isinstance(a, float):
        return a == b and not (math.isnan(a) or math.isnan(b))
    if isinstance(a, RobotHandle):
        return a.name == b.name
    return a == b
