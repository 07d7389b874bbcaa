"""Regenerate the skateboard-truck fixture JSON files."""
import json
import math
import re
from pathlib import Path

from asmgen.pose import Pose

OUT = Path(__file__).resolve().parents[1] / "src" / "asmgen" / "data" / "fixtures"


def pose(x, y, z, yaw=0.0):
    return [round(v, 15) + 0.0 for v in Pose.from_xyz_rpy(x, y, z, 0.0, 0.0, yaw).to_list()]


# (DLD name, GLD, class, mass kg, design xyz + yaw, kit x, adjacent, joints, subassembly, half extents)
PARTS = [
    ("Kingpin-Bolt-91257A662-Zinc-Plated-Hex-Head-Screw", "Kingpin", "kingpin", 0.03,
     (0.0, 0.0, 0.05, 0.0), -0.33, ["Base", "Hanger", "Nut"],
     [("Base", "threaded"), ("Nut", "threaded")], "truck", (0.01, 0.01, 0.02)),
    ("Powell-Peralta-90a-art-bones-wheel", "Wheel", "wheel", 0.1,
     (0.1, 0.0, 0.12, 0.0), -0.22, ["Axle", "Bearing"],
     [("Axle", "revolute")], "wheel_set", (0.027, 0.027, 0.018)),
    ("Hardcore-Bearing", "Bearing", "bearing", 0.012,
     (0.1, 0.0, 0.13, 0.0), -0.11, ["Wheel", "Axle"],
     [("Wheel", "press_fit")], "wheel_set", (0.011, 0.011, 0.0035)),
    ("Kingpin-Nut-93298A135-Medium-Strength-Steel-Nylon-Insert-Flange-Locknut", "Nut", "nut",
     0.008, (0.0, 0.0, 0.09, 0.0), 0.0, ["Kingpin", "Hanger"],
     [("Kingpin", "threaded")], "truck", (0.012, 0.012, 0.006)),
    ("Aera-Baseplate-Pneumatic-Fixture-v26", "Base", "baseplate", 0.15,
     (0.0, 0.0, 0.02, 0.0), 0.11, ["Kingpin", "Hanger"],
     [("Kingpin", "threaded")], "truck", (0.03, 0.04, 0.01)),
    ("Aera-Trucks-4140-Axle-+4MM", "Axle", "axle", 0.09,
     (0.0, 0.0, 0.10, math.pi / 2), 0.22, ["Hanger", "Wheel", "Bearing"],
     [("Hanger", "press_fit"), ("Wheel", "revolute")], "truck", (0.004, 0.1, 0.004)),
    ("Area-K4-Hanger", "Hanger", "hanger", 0.2,
     (0.0, 0.0, 0.06, math.pi / 2), 0.33, ["Base", "Kingpin", "Nut", "Axle"],
     [("Base", "pivot"), ("Axle", "press_fit")], "truck", (0.02, 0.02, 0.02)),
]


def main():
    gld_to_dld = {p[1]: p[0] for p in PARTS}
    parts = []
    for dld, gld, cls, mass, dp, _kit, adj, joints, sub, half in PARTS:
        parts.append({
            "name": dld, "gld": gld, "part_class": cls, "mass": mass,
            "design_pose": pose(*dp),
            "adjacent": [gld_to_dld[a] for a in adj],
            "joints": [{"part": gld_to_dld[o], "kind": k} for o, k in joints],
            "subassembly": sub,
            "half_extents": list(half),
        })
    assembly = {"assembly_name": "skateboard_truck", "origin_frame": pose(0, 0, 0), "parts": parts}

    grippers = [
        ("Custom Kingpin Gripper", "Custom fingers shaped for the hex head of the kingpin bolt. "
         "Use it only for kingpin bolts.", ["kingpin"]),
        ("All-Purpose Gripper", "Parallel-jaw gripper for round and bar-shaped parts: wheels, "
         "bearings, axles and hangers.", ["wheel", "bearing", "axle", "hanger"]),
        ("Ratcheting Gripper", "Ratcheting socket gripper for nuts and similar fastening "
         "hardware.", ["nut"]),
        ("Custom Baseplate Gripper", "Custom fingers matched to the truck baseplate.",
         ["baseplate"]),
    ]
    workcell = {
        "robots": [
            {"name": "left", "base_pose": pose(-0.8, 0, 0),
             "workspace": {"min": [-1.3, -1.0, 0.05], "max": [0.5, 1.0, 1.3]},
             "retract_pose": pose(-0.6, 0, 0.8)},
            {"name": "right", "base_pose": pose(0.8, 0, 0),
             "workspace": {"min": [-0.5, -1.0, 0.05], "max": [1.3, 1.0, 1.3]},
             "retract_pose": pose(0.6, 0, 0.8)},
        ],
        "tool_rack": [
            {"slot_pose": pose(1.5, -0.3 + 0.2 * i, 0.3),
             "gripper": {"name": n, "description": d, "compatible_classes": c,
                         "grasp_offset": pose(0, 0, -0.1)}}
            for i, (n, d, c) in enumerate(grippers)
        ],
        "stations": [
            {"name": "kit", "kind": "kit", "pose": pose(0, -0.5, 0.04),
             "half_extents": [0.4, 0.15, 0.02]},
            {"name": "vise", "kind": "vise", "pose": pose(0, 0.5, 0.10),
             "half_extents": [0.08, 0.08, 0.05]},
            {"name": "bin", "kind": "bin", "pose": pose(-0.7, -0.5, 0.12),
             "half_extents": [0.1, 0.1, 0.06]},
            {"name": "tool_rack", "kind": "rack", "pose": pose(1.5, 0, 0.35),
             "half_extents": [0.05, 0.4, 0.05]},
        ],
        "initial_part_locations": {p[0]: pose(p[5], -0.5, 0.04 + p[9][2]) for p in PARTS},
    }
    OUT.mkdir(parents=True, exist_ok=True)
    for fname, doc in (("truck_assembly.json", assembly), ("truck_workcell.json", workcell)):
        (OUT / fname).write_text(dumps(doc) + "\n", encoding="utf-8")


def dumps(doc):
    """Indented JSON with numeric arrays kept on one line."""
    text = json.dumps(doc, indent=2)
    return re.sub(r"\[\s*([-0-9.e+,\s]+?)\s*\]",
                  lambda m: "[" + ", ".join(v.strip() for v in m.group(1).split(",")) + "]", text)


if __name__ == "__main__":
    main()
