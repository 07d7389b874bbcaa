"""Regenerate the replay transcripts shipped with the package.

Each transcript is a list of canned model replies; the scripts in them are
written by hand against the skateboard-truck fixture.
"""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "asmgen" / "data" / "transcripts"
HEADER = "from workcell_api import *\n\n"

GRIPPER = {
    "Kingpin": "Custom Kingpin Gripper", "Wheel": "All-Purpose Gripper",
    "Bearing": "All-Purpose Gripper", "Nut": "Ratcheting Gripper",
    "Base": "Custom Baseplate Gripper", "Axle": "All-Purpose Gripper",
    "Hanger": "All-Purpose Gripper",
}
DLD = {
    "Kingpin": "Kingpin-Bolt-91257A662-Zinc-Plated-Hex-Head-Screw",
    "Wheel": "Powell-Peralta-90a-art-bones-wheel",
    "Bearing": "Hardcore-Bearing",
    "Nut": "Kingpin-Nut-93298A135-Medium-Strength-Steel-Nylon-Insert-Flange-Locknut",
    "Base": "Aera-Baseplate-Pneumatic-Fixture-v26",
    "Axle": "Aera-Trucks-4140-Axle-+4MM",
    "Hanger": "Area-K4-Hanger",
}
TABLE_ORDER = ["Kingpin", "Wheel", "Bearing", "Nut", "Base", "Axle", "Hanger"]


def reply(source, note="Here is the script."):
    return f"{note}\n\n```wcs\n{source.rstrip()}\n```\n"


def entry(response, *expect):
    return {"expect_contains": list(expect), "response": response}


def detect_script(part):
    return HEADER + f'''def main(workcell):
    """Detect {part} and report its pose."""
    let pose = workcell.detect("{part}")
    print("{part} at", pose.x, pose.y, pose.z)
'''


def pick_script(part, gripper, doc=None):
    doc = doc or f"Pick {part} from the kit."
    return HEADER + f'''def main(workcell):
    """{doc}"""
    let robot = workcell.get_robot("left")
    robot.retract()
    robot.attach_gripper("{gripper}")
    # hover above the grasp point, then descend
    let grasp = robot.grasp_pose("{part}")
    let above = grasp.translated(0, 0, 0.3)
    robot.move_cartesian(above)
    robot.move_cartesian(grasp)
    robot.pick("{part}")
    robot.move_cartesian(above)
'''


def place_in_vise_script(part):
    return HEADER + f'''def main(workcell):
    """Place {part} in the vise at its design pose."""
    let robot = workcell.get_robot("left")
    let target = workcell.assembly_origin() @ workcell.design_pose("{part}")
    let above = robot.tcp_for(target).translated(0, 0, 0.3)
    robot.move_cartesian(above)
    robot.place("{part}", target)
    robot.move_cartesian(above)
    robot.retract()
'''


KINGPIN_PLACE = HEADER + '''def main(workcell):
    """Place Kingpin Bolt on Baseplate.

    Subtask: place the held kingpin bolt on the baseplate already in the vise.
    """
    let robot = workcell.get_robot("left")
    robot.retract()
    # where the baseplate sits right now
    let base = workcell.detect("Base")
    # kingpin pose relative to the baseplate, taken from the design poses
    let relative = workcell.invert(workcell.design_pose("Base")) @ workcell.design_pose("Kingpin")
    let target = base @ relative
    # tool pose that puts the kingpin on target
    let above = robot.tcp_for(target).translated(0, 0, 0.3)
    robot.move_cartesian(above)
    robot.place("Kingpin", target)
    robot.move_cartesian(above)
    robot.retract()
'''


def insert_script(part, mate):
    return HEADER + f'''def main(workcell):
    """Insert {part} on {mate}."""
    let robot = workcell.get_robot("left")
    let mate = workcell.detect("{mate}")
    let target = mate @ workcell.invert(workcell.design_pose("{mate}")) @ workcell.design_pose("{part}")
    let above = robot.tcp_for(target).translated(0, 0, 0.3)
    robot.move_cartesian(above)
    robot.insert("{part}", "{mate}")
    robot.move_cartesian(above)
    robot.retract()
'''


INSERT_ON_KINGPIN = HEADER + '''def main(workcell):
    """Insert Part on Kingpin Bolt: the hanger goes over the kingpin."""
    let robot = workcell.get_robot("left")
    robot.retract()
    robot.attach_gripper("All-Purpose Gripper")
    let grasp = robot.grasp_pose("Hanger")
    robot.move_cartesian(grasp.translated(0, 0, 0.3))
    robot.move_cartesian(grasp)
    robot.pick("Hanger")
    robot.move_cartesian(grasp.translated(0, 0, 0.3))
    # hanger pose relative to the kingpin as it sits now
    let kingpin = workcell.detect("Kingpin")
    let target = kingpin @ workcell.invert(workcell.design_pose("Kingpin")) @ workcell.design_pose("Hanger")
    let above = robot.tcp_for(target).translated(0, 0, 0.3)
    robot.move_cartesian(above)
    robot.insert("Hanger", "Kingpin")
    robot.move_cartesian(above)
    robot.retract()
'''

RANDOM_MOVES_V1 = HEADER + '''def main(workcell):
    """Move the robot to 100 random positions."""
    let robot = workcell.get_robot("left")
    print("Generating a wild transform")
    raise Exception("deliberate early failure to exercise error reporting")
    for i in range(100):
        let p = robot.tcp_pose
        let target = p.translated(random_uniform(-5, 5), random_uniform(-5, 5), random_uniform(-5, 5))
        robot.move_cartesian(target)
'''

RANDOM_MOVES_V2 = HEADER + '''def main(workcell):
    """Move the robot to 100 random positions."""
    let robot = workcell.get_robot("left")
    print("Generating a wild transform")
    # raise Exception("deliberate early failure to exercise error reporting")
    for i in range(100):
        let p = robot.tcp_pose
        let target = p.translated(random_uniform(-5, 5), random_uniform(-5, 5), random_uniform(-5, 5))
        robot.move_cartesian(target)
'''

RANDOM_MOVES_V3 = HEADER + '''def main(workcell):
    """Move the robot to 100 random positions."""
    let robot = workcell.get_robot("left")
    let skipped = 0
    for i in range(100):
        let p = robot.tcp_pose
        # offsets are a tenth of the previous range
        let target = p.translated(random_uniform(-0.5, 0.5), random_uniform(-0.5, 0.5), random_uniform(-0.5, 0.5))
        try:
            robot.move_cartesian(target)
        except Exception as e:
            skipped = skipped + 1
            print("skipping move", i, e)
    print("moves skipped:", skipped)
'''


def golden_plan():
    plan = []

    def step(desc, behavior, *parts):
        plan.append({"subtask": desc, "behavior": behavior, "parts": list(parts)})

    step("Detect Base", "Detect", "Base")
    step("Pick Base", "Pick", "Base")
    step("Place Base in the vise", "Place", "Base")
    step("Detect Kingpin", "Detect", "Kingpin")
    step("Pick Kingpin Bolt", "Pick", "Kingpin")
    step("Place Kingpin Bolt on Baseplate", "Place", "Kingpin", "Base")
    for part, mate in (("Hanger", "Kingpin"), ("Nut", "Kingpin"), ("Axle", "Hanger"),
                       ("Wheel", "Axle"), ("Bearing", "Wheel")):
        step(f"Detect {part}", "Detect", part)
        step(f"Pick {part}", "Pick", part)
        step(f"Insert {part} on {mate}", "Insert", part, mate)
    return plan


def golden_script(step):
    desc, behavior, parts = step["subtask"], step["behavior"], step["parts"]
    if behavior == "Detect":
        return detect_script(parts[0])
    if behavior == "Pick":
        return pick_script(parts[0], GRIPPER[parts[0]])
    if desc == "Place Kingpin Bolt on Baseplate":
        return KINGPIN_PLACE
    if behavior == "Place":
        return place_in_vise_script(parts[0])
    return insert_script(parts[0], parts[1])


def golden_truck():
    plan = golden_plan()
    tx = [entry("```json\n" + json.dumps(plan, indent=2) + "\n```\n",
                "Task: Assemble the Skateboard Truck")]
    for step in plan:
        tx.append(entry(reply(golden_script(step)), f"Subtask: {step['subtask']}"))
    return tx


def debugging():
    return [
        entry(reply(RANDOM_MOVES_V1), "Subtask: Move the robot to 100 random positions"),
        entry(reply(RANDOM_MOVES_V2, "The raise was only a test; it is commented out now."),
              "deliberate early failure"),
        entry(reply(RANDOM_MOVES_V3, "The offsets were too large. They are ten times smaller "
                    "now, and failed moves are skipped."),
              "MotionException", "unreachable position"),
    ]


def table1(naming):
    tx = []
    for gld in TABLE_ORDER:
        name = gld if naming == "gld" else DLD[gld]
        if naming == "dld" and gld == "Kingpin":
            tx.append(entry(reply(pick_script(name, "All-Purpose Gripper", f"Pick {name}.")),
                            f"Subtask: Pick {name}"))
            tx.append(entry(reply(pick_script(name, GRIPPER[gld], f"Pick {name}."),
                                  "That part is a kingpin bolt, so it needs the custom kingpin "
                                  "gripper."),
                            "GripperMismatch"))
            continue
        tx.append(entry(reply(pick_script(name, GRIPPER[gld], f"Pick {name}.")),
                        f"Subtask: Pick {name}"))
    return tx


def kingpin():
    return [
        entry(reply(pick_script("Kingpin", GRIPPER["Kingpin"], "Pick Kingpin Bolt.")),
              "Subtask: Pick Kingpin Bolt"),
        entry(reply(KINGPIN_PLACE), "Subtask: Place Kingpin Bolt on Baseplate"),
        entry(reply(INSERT_ON_KINGPIN), "Subtask: Insert Part on Kingpin Bolt"),
    ]


def exhaustion(attempts=5):
    plan = [{"subtask": "Pick Kingpin Bolt", "behavior": "Pick", "parts": ["Kingpin"]}]
    tx = [entry(json.dumps(plan), "Task: Pick the kingpin bolt")]
    for i in range(attempts):
        tx.append(entry(reply(pick_script("Kingpin", "All-Purpose Gripper", "Pick Kingpin Bolt.")),
                        "Subtask: Pick Kingpin Bolt"))
    return tx


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "golden_truck.json": golden_truck(),
        "debugging.json": debugging(),
        "table1_gld.json": table1("gld"),
        "table1_dld.json": table1("dld"),
        "kingpin.json": kingpin(),
        "exhaustion.json": exhaustion(),
    }
    for name, tx in files.items():
        (OUT / name).write_text(json.dumps(tx, indent=2, ensure_ascii=False) + "\n",
                                encoding="utf-8")


if __name__ == "__main__":
    main()
