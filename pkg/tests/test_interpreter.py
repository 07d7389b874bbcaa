import threading

import pytest

from asmgen.sim import RuntimeScriptError, SimulationThread
from asmgen.wcs import parse

from generators import atomicity_violations


def run(sim, body, helpers="", **kw):
    src = helpers + "def main(workcell):\n" + "".join(f"    {line}\n" for line in body.split("\n"))
    return sim.run_script(parse(src), **kw).output


def fails(sim, body, **kw):
    with pytest.raises(RuntimeScriptError) as err:
        run(sim, body, **kw)
    return err.value


@pytest.mark.parametrize("expr, shown", [
    ("1 + 2 * 3", "7"),
    ("7 / 2", "3.5"),
    ("2 - 5", "-3"),
    ("\"ab\" + \"c\"", "ab"),
    ("[1, 2] + [3]", "[1, 2, 3]"),
    ("len([1, 2, 3])", "3"),
    ("1 < 2 and 2 < 1", "False"),
    ("not 0", "True"),
    ("[4, 5, 6][-1]", "6"),
    ("\"wheel\" == \"wheel\"", "True"),
])
def test_expressions(sim, expr, shown):
    assert run(sim, f"print({expr})")[0].startswith(shown)


def test_range_and_accumulate(sim):
    out = run(sim, "let t = 0\nfor i in range(5):\n    t = t + i\nprint(t)")
    assert out == ["10"]


def test_helper_function_and_return(sim):
    out = run(sim, "print(double(21))",
              helpers="def double(x):\n    return x * 2\n\n")
    assert out == ["42"]


def test_pose_operations(sim):
    out = run(sim, "\n".join([
        "let a = workcell.translation(1, 0, 0)",
        "let b = workcell.translation(0, 2, 0)",
        "let c = a @ b",
        "print(c.translation)",
        "print(c.inverse().translation)",
        "print((workcell.identity() @ a).translated(0, 0, 1).translation)",
    ]))
    assert out == ["[1, 2, 0]", "[-1, -2, 0]", "[1, 0, 1]"]


@pytest.mark.parametrize("body, kind", [
    ("print(1 / 0)", "ZeroDivisionError"),
    ("print([1][3])", "IndexError"),
    ("print(\"a\" - 1)", "TypeError"),
    ("raise Exception(\"boom\")", "Exception"),
    ("raise MotionException(\"custom\")", "MotionException"),
    ("workcell.get_robot(\"middle\")", "StateError"),
    ("workcell.detect(\"Deck\")", "StateError"),
    ("for i in range(1, 5, 0):\n    pass", "ValueError"),
])
def test_runtime_errors(sim, body, kind):
    assert fails(sim, body).kind == kind


def test_error_span_points_at_faulting_statement(sim):
    err = fails(sim, "let x = 1\nlet y = 2\nprint(x / (y - 2))")
    assert err.span.line == 4
    assert err.excerpt == "    print(x / (y - 2))"
    assert err.feedback().startswith("ZeroDivisionError: division by zero\n at line 4")


def test_except_matches_kind(sim):
    out = run(sim, "\n".join([
        "try:",
        "    workcell.get_robot(\"left\").move_cartesian(workcell.translation(0, 0, 10))",
        "except CollisionError:",
        "    print(\"wrong handler\")",
        "except MotionException as e:",
        "    print(e)",
    ]))
    assert out[0].startswith("MotionException: unreachable position")


def test_unmatched_handler_propagates(sim):
    err = fails(sim, "try:\n    print(1 / 0)\nexcept IndexError:\n    print(\"no\")")
    assert err.kind == "ZeroDivisionError"


def test_bare_raise_reraises(sim):
    err = fails(sim, "try:\n    raise Exception(\"first\")\nexcept Exception:\n    raise")
    assert err.kind == "Exception" and err.message == "first"
    assert err.span.line == 5


def test_step_limit_cannot_be_caught(sim):
    err = fails(sim, "try:\n    for i in range(100000):\n        pass\nexcept Exception:\n    pass",
                step_limit=1000)
    assert err.kind == "StepLimitExceeded"


def test_call_depth_limit(sim):
    src = "".join(f"def f{i}(x):\n    return f{i + 1}(x)\n\n" for i in range(30))
    src += "def f30(x):\n    return x\n\n"
    with pytest.raises(RuntimeScriptError) as exc:
        sim.run_script(parse(src + "def main(workcell):\n    try:\n        print(f0(1))\n"
                                    "    except Exception:\n        pass\n"))
    assert exc.value.kind == "RecursionError"


def test_huge_list_is_refused(sim):
    assert fails(sim, "let xs = [0]\nfor i in range(40):\n    xs = xs + xs").kind == "ValueError"


# -- failure atomicity --------------------------------------------------------------

def test_failed_runs_leave_state_untouched(sim):
    violations, mutated = atomicity_violations(sim, 500)
    assert violations == 0
    assert mutated > 100


def test_successful_run_advances_state(sim):
    before = sim.state_dict()
    run(sim, "workcell.get_robot(\"left\").attach_gripper(\"All-Purpose Gripper\")")
    assert sim.state_dict() != before
    assert sim.robot("left").mounted_gripper == "All-Purpose Gripper"


# -- simulation thread ---------------------------------------------------------------

def test_thread_serializes_commands(sim):
    with SimulationThread(sim) as thread:
        names = thread.call(lambda s: threading.current_thread().name)
        assert names == "workcell-sim"
        thread.call(lambda s: s.attach_gripper("left", "All-Purpose Gripper"))
        with pytest.raises(Exception):
            thread.call(lambda s: s.attach_gripper("right", "All-Purpose Gripper"))
    assert thread.stop_count == 1
    thread.stop()
    assert thread.stop_count == 1
    with pytest.raises(RuntimeError):
        thread.call(lambda s: None)
