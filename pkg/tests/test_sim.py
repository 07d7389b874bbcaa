import random

import numpy as np
import pytest

from asmgen.pose import Pose, translation_error
from asmgen.scenarios import transcript_path
from asmgen.sim import (CollisionError, GraspFault, GripperMismatch, MotionException,
                        RuntimeScriptError, SimConfig, Simulator, StateError)
from asmgen.wcs import extract_code_block, parse
from asmgen.llm import load_transcript

from generators import compare_motions
from oracles import HALF, box_overlap, oracle_obstacles, swept_first_hit

KINGPIN = "Kingpin-Bolt-91257A662-Zinc-Plated-Hex-Head-Screw"


def up(sim, robot, x, y, z, safe=0.4):
    """Approach a point from above."""
    sim.move_cartesian(robot, Pose.from_translation(x, y, safe))
    sim.move_cartesian(robot, Pose.from_translation(x, y, z))


def grab(sim, robot, gripper, part):
    sim.attach_gripper(robot, gripper)
    g = sim.grasp_pose(robot, part)
    up(sim, robot, *g.translation)
    sim.pick(robot, part)
    t = sim.robot(robot).tcp_pose.translation
    sim.move_cartesian(robot, Pose.from_translation(t[0], t[1], 0.4))


# -- checkpoint / restore ---------------------------------------------------------

def test_checkpoint_restore(sim, truck_workcell):
    cp = sim.checkpoint("start")
    before = sim.state_dict()
    for part, pose in truck_workcell.initial_part_locations.items():
        assert sim.state.parts[part].pose == pose
    sim.move_cartesian("left", Pose.from_translation(-0.5, 0.2, 0.6))
    sim.random_uniform(0, 1)
    assert sim.state_dict() != before
    sim.restore(cp)
    assert sim.state_dict() == before
    sim.move_cartesian("left", Pose.from_translation(-0.5, 0.2, 0.6))
    assert sim.restore(cp) == sim.restore(cp)


def test_state_dump_round_trip(sim):
    sim.attach_gripper("left", "Custom Kingpin Gripper")
    dump = sim.dump_state()
    other = Simulator(sim.workcell, sim.assembly)
    import json
    other.load_state(json.loads(dump))
    assert other.state == sim.state
    with pytest.raises(StateError):
        other.load_state({"robots": {"nobody": {}}})


# -- motion ---------------------------------------------------------------------------

def test_move_inside_workspace(sim):
    target = Pose.from_xyz_rpy(-0.5, 0.2, 0.6, 0, 0, 0.3)
    sim.move_cartesian("left", target)
    assert sim.robot("left").tcp_pose == target
    assert sim.state.step_counter == 1


def test_move_ten_meters_up(sim):
    before = sim.state_dict()
    with pytest.raises(MotionException, match="unreachable position") as err:
        sim.move_cartesian("left", Pose.from_translation(-0.6, 0.0, 10.0))
    assert "10.000" in str(err.value)
    assert sim.state_dict() == before


def test_sweep_through_vise(sim):
    sim.move_cartesian("left", Pose.from_translation(-0.3, 0.5, 0.06))
    start = sim.robot("left").tcp_pose.translation
    end = np.array([0.3, 0.5, 0.06])
    expected = swept_first_hit(start, end, HALF, oracle_obstacles(sim.workcell, sim.state, "left"))
    assert expected is not None and expected[1] == "vise"
    with pytest.raises(CollisionError) as err:
        sim.move_cartesian("left", Pose.from_translation(*end))
    assert err.value.bodies == ("robot_left", "vise")
    assert f"step {expected[0]} of 64" in str(err.value)


def test_robots_see_each_other(sim):
    with pytest.raises(CollisionError) as err:
        sim.move_cartesian("left", Pose.from_translation(0.5, 0.0, 0.8))
    assert err.value.bodies == ("robot_left", "robot_right")


def test_retract(sim):
    sim.move_cartesian("left", Pose.from_translation(-0.6, 0.3, 0.5))
    sim.retract("left")
    assert sim.robot("left").tcp_pose == sim.robot("left").retract_pose
    sim.retract("left")  # already there
    assert sim.robot("left").tcp_pose == sim.robot("left").retract_pose


def test_retract_blocked_by_part(sim):
    sim.move_cartesian("left", Pose.from_translation(-0.6, 0.0, 0.3))
    sim.state.parts["Hardcore-Bearing"].pose = Pose.from_translation(-0.6, 0.0, 0.55)
    start = sim.robot("left").tcp_pose.translation
    end = sim.robot("left").retract_pose.translation
    obstacles = oracle_obstacles(sim.workcell, sim.state, "left",
                                 part_half=sim.part_half_extents("Hardcore-Bearing"))
    obstacles = [o for o in obstacles if o[0] == "Hardcore-Bearing" or o[0] not in sim.state.parts]
    assert swept_first_hit(start, end, HALF, obstacles)[1] == "Hardcore-Bearing"
    with pytest.raises(CollisionError) as err:
        sim.retract("left")
    assert err.value.bodies == ("robot_left", "Hardcore-Bearing")


# -- grippers and picking ---------------------------------------------------------------

def test_attach_gripper(sim):
    sim.attach_gripper("left", "Custom Kingpin Gripper")
    assert sim.robot("left").mounted_gripper == "Custom Kingpin Gripper"
    assert sim.state.rack["Custom Kingpin Gripper"] == ("robot", "left")
    sim.attach_gripper("left", "All-Purpose Gripper")
    assert sim.state.rack["Custom Kingpin Gripper"][0] == "slot"
    with pytest.raises(StateError, match="mounted on robot 'left'"):
        sim.attach_gripper("right", "All-Purpose Gripper")
    with pytest.raises(StateError):
        sim.attach_gripper("left", "Sticky Gripper")


def test_attach_while_holding(sim):
    grab(sim, "left", "All-Purpose Gripper", "Wheel")
    with pytest.raises(GraspFault):
        sim.attach_gripper("left", "Custom Kingpin Gripper")


def test_kingpin_needs_custom_gripper(sim):
    sim.attach_gripper("left", "All-Purpose Gripper")
    up(sim, "left", *sim.grasp_pose("left", "Kingpin").translation)
    with pytest.raises(GripperMismatch) as err:
        sim.pick("left", "Kingpin")
    assert str(err.value) == (
        f"gripper 'All-Purpose Gripper' cannot grasp part {KINGPIN!r} of class 'kingpin'")


def test_kingpin_pick_with_custom_gripper(sim):
    grab(sim, "left", "Custom Kingpin Gripper", "Kingpin")
    assert sim.holder(KINGPIN) == "left"
    assert sim.robot("left").held_part == KINGPIN


def test_pick_too_far(sim):
    sim.attach_gripper("left", "Custom Kingpin Gripper")
    g = sim.grasp_pose("left", "Kingpin").translation
    up(sim, "left", g[0], g[1], g[2] + 0.1)
    with pytest.raises(GraspFault, match="not within grasp tolerance"):
        sim.pick("left", "Kingpin")


def test_pick_preconditions(sim):
    with pytest.raises(GraspFault, match="no gripper"):
        sim.pick("left", "Kingpin")
    grab(sim, "left", "All-Purpose Gripper", "Wheel")
    with pytest.raises(GraspFault, match="already holding"):
        sim.pick("left", "Bearing")


# -- place / insert -------------------------------------------------------------------------

def test_place_kingpin(sim):
    grab(sim, "left", "Custom Kingpin Gripper", "Kingpin")
    target = Pose.from_xyz_rpy(-0.3, 0.2, 0.3, 0, 0, 0.5)
    sim.place("left", "Kingpin", target)
    part = sim.state.parts[KINGPIN]
    assert translation_error(part.pose, target) <= 1e-6
    assert part.held_by is None and sim.robot("left").held_part is None


def test_insert_bearing_into_wheel(sim, truck_assembly):
    wheel = truck_assembly.resolve("Wheel")
    bearing = truck_assembly.resolve("Bearing")
    grab(sim, "left", "All-Purpose Gripper", "Bearing")
    sim.insert("left", "Bearing", "Wheel")
    wheel_now = sim.state.parts[wheel].pose.matrix
    wd = truck_assembly.part(wheel).design_pose.matrix
    bd = truck_assembly.part(bearing).design_pose.matrix
    # hand-built expectation: wheel_current . inv(wheel_design) . bearing_design
    inv_wd = np.eye(4)
    inv_wd[:3, :3] = wd[:3, :3].T
    inv_wd[:3, 3] = -wd[:3, :3].T @ wd[:3, 3]
    expected = wheel_now @ inv_wd @ bd
    got = sim.state.parts[bearing].pose.matrix
    assert np.max(np.abs(got - expected)) <= 1e-6
    assert sim.events[-1] == {"op": "insert", "robot": "left", "part": bearing, "target": wheel}


def test_insert_non_adjacent(sim):
    grab(sim, "left", "Ratcheting Gripper", "Nut")
    with pytest.raises(StateError, match="not adjacent"):
        sim.insert("left", "Nut", "Wheel")


def test_place_without_holding(sim):
    with pytest.raises(StateError, match="not holding"):
        sim.place("left", "Nut", Pose.identity())


# -- detect --------------------------------------------------------------------------------

def test_detect_exact(sim, truck_workcell, truck_assembly):
    axle = truck_assembly.resolve("Axle")
    assert sim.detect("Axle") == truck_workcell.initial_part_locations[axle]


def test_detect_noise_statistics(truck_workcell, truck_assembly):
    sigma = 0.001
    sim = Simulator(truck_workcell, truck_assembly, SimConfig(seed=11, detect_sigma=sigma))
    truth = sim.part("Axle").pose.translation
    errs = np.array([sim.detect("Axle").translation - truth for _ in range(1000)])
    assert np.all(np.abs(errs) <= 6 * sigma)
    assert np.linalg.norm(errs.mean(axis=0)) < 0.0002


def test_detect_unknown(sim):
    with pytest.raises(StateError):
        sim.detect("Deck")


# -- properties ------------------------------------------------------------------------------

def test_collision_matches_oracle_on_1000_motions():
    disagreements, accepted, rejected, unreachable = compare_motions(1000)
    assert disagreements == 0
    assert accepted > 100 and rejected > 100 and unreachable > 50


def test_oracle_box_overlap_is_strict():
    assert not box_overlap([0, 0, 0], [1, 1, 1], [1, 0, 0], [2, 1, 1])
    assert box_overlap([0, 0, 0], [1, 1, 1], [0.999, 0, 0], [2, 1, 1])


def test_held_part_rigid_after_every_step(sim):
    sim.attach_gripper("left", "All-Purpose Gripper")
    up(sim, "left", *sim.grasp_pose("left", "Wheel").translation)
    sim.pick("left", "Wheel")
    wheel = sim.part_name("Wheel")
    rng = random.Random(3)
    for _ in range(50):
        target = Pose.from_xyz_rpy(rng.uniform(-1.0, -0.3), rng.uniform(-0.3, 0.3),
                                   rng.uniform(0.4, 1.0), rng.uniform(-1, 1), 0, rng.uniform(-3, 3))
        sim.move_cartesian("left", target)
        p = sim.state.parts[wheel]
        assert p.pose == sim.robot("left").tcp_pose @ p.held_by[1]


def _random_motion_script(n):
    return parse(extract_code_block(load_transcript(transcript_path("debugging"))[n].response))


def test_same_seed_same_state(truck_workcell, truck_assembly):
    finals = []
    for _ in range(2):
        sim = Simulator(truck_workcell, truck_assembly, SimConfig(seed=42))
        result = sim.run_script(_random_motion_script(2))
        finals.append((sim.dump_state(), result.output))
    assert finals[0] == finals[1]
    other = Simulator(truck_workcell, truck_assembly, SimConfig(seed=43))
    other.run_script(_random_motion_script(2))
    assert other.dump_state() != finals[0][0]


def test_run_script_reports_span(sim):
    v1 = _random_motion_script(0)
    before = sim.state_dict()
    with pytest.raises(RuntimeScriptError) as err:
        sim.run_script(v1)
    assert err.value.kind == "Exception" and err.value.span.line == 7
    assert err.value.excerpt.strip().startswith("raise Exception")
    assert sim.state_dict() == before
    with pytest.raises(RuntimeScriptError) as err:
        sim.run_script(_random_motion_script(1))
    assert err.value.kind == "MotionException"
    assert "unreachable position" in err.value.message
    assert err.value.excerpt.strip() == "robot.move_cartesian(target)"
    assert sim.state_dict() == before
