"""Replay scenarios on the skateboard-truck fixture.

Each function runs one scripted experiment through the real pipeline with
a replay provider and returns its report(s).  The acceptance tests and the
demo scripts are thin wrappers around these.
"""
from importlib import resources
from pathlib import Path

from .llm import ReplayProvider
from .orchestrator import Pipeline, RunConfig
from .planner import Subtask, SubtaskPlan

TRUCK_TASK = "Assemble the Skateboard Truck"
TABLE_ORDER = ("Kingpin", "Wheel", "Bearing", "Nut", "Base", "Axle", "Hanger")
RANDOM_MOVES = "Move the robot to 100 random positions"


def data_path(*parts):
    return str(Path(str(resources.files("asmgen.data"))).joinpath(*parts))


def fixture_paths():
    return (data_path("fixtures", "truck_assembly.json"),
            data_path("fixtures", "truck_workcell.json"))


def transcript_path(name):
    return data_path("transcripts", f"{name}.json")


def _config(out_dir, transcript, **kw):
    design, workcell = fixture_paths()
    return RunConfig(design=design, workcell=workcell, out_dir=str(out_dir),
                     provider=f"replay:{transcript_path(transcript)}", **kw)


def _plan(*steps, task=""):
    return SubtaskPlan([Subtask(d, b, list(p), i) for i, (d, b, p) in enumerate(steps, 1)],
                       task)


def debugging_loop(out_dir, parallel_sga=1, seed=0):
    """One Move subtask whose first two scripts fail, repaired on the third."""
    pipe = Pipeline(_config(out_dir, "debugging", parallel_sga=parallel_sga, seed=seed))
    return pipe.run_plan(_plan((RANDOM_MOVES, "Move", []), task=RANDOM_MOVES))


def gripper_selection(out_dir, naming="gld", parallel_sga=1):
    """Pick each truck part on a fresh workcell; returns {gld: report}."""
    cfg = _config(out_dir, f"table1_{naming}", naming=naming, parallel_sga=parallel_sga)
    provider = ReplayProvider.from_file(transcript_path(f"table1_{naming}"))
    reports = {}
    for gld in TABLE_ORDER:
        cfg.out_dir = str(Path(out_dir) / gld.lower())
        pipe = Pipeline(cfg, provider=provider)
        name = gld if naming == "gld" else pipe.assembly.part(pipe.assembly.resolve(gld)).name
        reports[gld] = pipe.run_plan(_plan((f"Pick {name}", "Pick", [name]), task=f"Pick {name}"))
    return reports


def place_base_in_vise(sim, robot="left"):
    """Setup step: put the baseplate at its design pose without a script."""
    sim.attach_gripper(robot, "Custom Baseplate Gripper")
    grasp = sim.grasp_pose(robot, "Base")
    sim.move_cartesian(robot, grasp.translated(0, 0, 0.3))
    sim.move_cartesian(robot, grasp)
    sim.pick(robot, "Base")
    sim.move_cartesian(robot, grasp.translated(0, 0, 0.3))
    target = sim.assembly_origin() @ sim.design_pose("Base")
    above = sim.tcp_for(robot, target).translated(0, 0, 0.3)
    sim.move_cartesian(robot, above)
    sim.place(robot, "Base", target)
    sim.move_cartesian(robot, above)
    sim.retract(robot)


def kingpin_sequence(out_dir, parallel_sga=1):
    """Pick the kingpin, place it on the baseplate, then insert the hanger over it."""
    pipe = Pipeline(_config(out_dir, "kingpin", parallel_sga=parallel_sga))
    plan = _plan(("Pick Kingpin Bolt", "Pick", ["Kingpin"]),
                 ("Place Kingpin Bolt on Baseplate", "Place", ["Kingpin", "Base"]),
                 ("Insert Part on Kingpin Bolt", "Insert", ["Hanger", "Kingpin"]),
                 task="Place the kingpin bolt")
    return pipe.run_plan(plan, setup=place_base_in_vise), pipe


def golden_truck(out_dir, parallel_sga=1):
    """Full pipeline (decomposition included) on the golden transcript."""
    pipe = Pipeline(_config(out_dir, "golden_truck", parallel_sga=parallel_sga,
                            task=TRUCK_TASK))
    return pipe.run(), pipe


def design_targets(assembly, workcell):
    """World pose of every part once assembled: vise top, origin frame, design pose."""
    vise = next(s for s in workcell.stations if s.kind == "vise")
    origin = vise.pose @ assembly.origin_frame
    return {p.name: origin @ p.design_pose for p in assembly.parts}
