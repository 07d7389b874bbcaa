import json
import threading

import pytest

from asmgen.errors import AbortedRun, AttemptsExhausted, ConfigError
from asmgen.llm import ReplayProvider, TranscriptEntry
from asmgen.orchestrator import Pipeline, RunConfig
from asmgen.planner import Subtask, SubtaskPlan
from asmgen.scenarios import debugging_loop, fixture_paths, kingpin_sequence, transcript_path


def config(tmp_path, **kw):
    design, workcell = fixture_paths()
    kw.setdefault("provider", f"replay:{transcript_path('exhaustion')}")
    return RunConfig(design=design, workcell=workcell, out_dir=str(tmp_path / "out"), **kw)


def plan(*steps):
    return SubtaskPlan([Subtask(d, b, list(p), i) for i, (d, b, p) in enumerate(steps, 1)], "t")


def test_empty_plan_completes(tmp_path):
    provider = ReplayProvider([TranscriptEntry(("Task: nothing",), "[]")])
    pipe = Pipeline(config(tmp_path, task="nothing"), provider=provider)
    report = pipe.run()
    assert report.status == "complete"
    assert report.scripts == [] and report.plan == []
    assert pipe.thread.stop_count == 1
    assert json.loads((tmp_path / "out" / "report.json").read_text())["status"] == "complete"


def test_exhaustion_aborts(tmp_path):
    pipe = Pipeline(config(tmp_path, task="Pick the kingpin bolt"))
    with pytest.raises(AbortedRun) as err:
        pipe.run()
    assert isinstance(err.value.cause, AttemptsExhausted)
    report = err.value.report
    assert report.status == "aborted"
    sub = report.subtasks[0]
    assert sub["attempts"] == 5 and sub["status"] == "failed"
    assert all(e.startswith("GripperMismatch") for e in sub["errors"])
    assert pipe.thread.stop_count == 1
    out = tmp_path / "out"
    assert (out / "report.md").read_text().count("GripperMismatch") >= 5
    lines = (out / "attempts.jsonl").read_text().splitlines()
    assert [json.loads(x)["outcome"] for x in lines] == ["runtime_failed"] * 5


def test_continue_on_failure(tmp_path):
    pipe = Pipeline(config(tmp_path, task="Pick the kingpin bolt", continue_on_failure=True,
                           max_attempts=5))
    with pytest.raises(AbortedRun):
        pipe.run()
    assert pipe.thread.stop_count == 1


def test_tda_failure_aborts_with_report(tmp_path):
    provider = ReplayProvider([TranscriptEntry((), json.dumps(
        [{"subtask": "Weld Axle", "behavior": "Weld", "parts": ["Axle"]}]))])
    with pytest.raises(AbortedRun) as err:
        Pipeline(config(tmp_path), provider=provider).run()
    assert "UnknownBehavior" in err.value.report.error
    assert (tmp_path / "out" / "report.json").exists()


@pytest.mark.parametrize("kw, fragment", [
    ({"max_attempts": 0}, "max_attempts"),
    ({"parallel_sga": 0}, "parallel_sga"),
    ({"provider": "carrier-pigeon:x"}, "unknown provider"),
    ({"provider": None}, "no provider"),
    ({"provider": "replay:/nonexistent/tx.json"}, "cannot open"),
])
def test_config_errors(tmp_path, kw, fragment):
    with pytest.raises(ConfigError, match=fragment):
        Pipeline(config(tmp_path, **kw))


def test_missing_design_file(tmp_path):
    cfg = config(tmp_path)
    cfg.design = str(tmp_path / "nope.json")
    with pytest.raises(ConfigError):
        Pipeline(cfg)


def test_kingpin_sequence_commits_in_order(tmp_path):
    report, pipe = kingpin_sequence(tmp_path / "k1")
    assert report.status == "complete"
    assert report.scripts == sorted(report.scripts)
    assert [s["attempts"] for s in report.subtasks] == [1, 1, 1]
    for name in report.scripts:
        assert (tmp_path / "k1" / name).exists()
    assert pipe.thread.stop_count == 1


@pytest.mark.parametrize("scenario", ["debugging", "kingpin"])
def test_parallel_matches_sequential(tmp_path, scenario):
    def go(k):
        out = tmp_path / f"k{k}"
        if scenario == "debugging":
            return debugging_loop(out, parallel_sga=k), out
        return kingpin_sequence(out, parallel_sga=k)[0], out

    (r1, o1), (r4, o4) = go(1), go(4)
    assert r1.comparable() == r4.comparable()
    for name in r1.scripts:
        assert (o1 / name).read_bytes() == (o4 / name).read_bytes()


class UnorderedFake:
    """Answers by subtask, in any call order, like a live model would."""

    ordered = False

    def __init__(self):
        self.calls = []
        self.lock = threading.Lock()

    def complete(self, request):
        last = request.messages[-1][1]
        with self.lock:
            self.calls.append(last.split("\n")[0])
        if "Subtask: Pick Wheel" in last:
            gripper = "All-Purpose Gripper" if "failed with this error" in last \
                else "Custom Kingpin Gripper"
            return PICK.format(gripper=gripper)
        if "Subtask: Move Wheel above the vise" in last:
            return MOVE
        raise AssertionError(f"unexpected prompt {last!r}")


PICK = """```
def main(workcell):
    let robot = workcell.get_robot("left")
    robot.attach_gripper("{gripper}")
    let grasp = robot.grasp_pose("Wheel")
    robot.move_cartesian(grasp.translated(0, 0, 0.3))
    robot.move_cartesian(grasp)
    robot.pick("Wheel")
    robot.move_cartesian(grasp.translated(0, 0, 0.3))
```"""
MOVE = """```
def main(workcell):
    let robot = workcell.get_robot("left")
    robot.move_cartesian(workcell.station_pose("vise").translated(-0.2, 0, 0.4))
```"""


def test_stale_draft_is_discarded_and_regenerated(tmp_path):
    fake = UnorderedFake()
    pipe = Pipeline(config(tmp_path, parallel_sga=2), provider=fake)
    report = pipe.run_plan(plan(("Pick Wheel", "Pick", ["Wheel"]),
                                ("Move Wheel above the vise", "Move", ["Wheel"])))
    assert report.status == "complete"
    assert report.discarded_drafts == 1
    assert [s["attempts"] for s in report.subtasks] == [2, 1]
    # two drafts, one repair, one regenerated draft
    assert len(fake.calls) == 4
    wheel = pipe.assembly.resolve("Wheel")
    state = json.loads((tmp_path / "out" / "report.json").read_text())["final_part_poses"][wheel]
    vise = pipe.workcell.station("vise").pose
    tcp_z = vise.z + 0.4
    assert abs(state[11] - (tcp_z - 0.1)) < 1e-9  # held 0.1 m below the TCP
    assert pipe.thread.stop_count == 1


def test_good_draft_is_committed_without_new_calls(tmp_path):
    fake_pick = PICK.format(gripper="All-Purpose Gripper")

    class AlwaysRight(UnorderedFake):
        def complete(self, request):
            last = request.messages[-1][1]
            with self.lock:
                self.calls.append(last.split("\n")[0])
            return fake_pick if "Pick Wheel" in last else MOVE

    fake = AlwaysRight()
    pipe = Pipeline(config(tmp_path, parallel_sga=2), provider=fake)
    report = pipe.run_plan(plan(("Pick Wheel", "Pick", ["Wheel"]),
                                ("Move Wheel above the vise", "Move", ["Wheel"])))
    assert report.status == "complete"
    assert report.discarded_drafts == 0 and len(fake.calls) == 2
