"""Pick every truck part once, naming parts by short description (GLD) and by
CAD name (DLD), and tabulate which attempts succeed.

    python3 demos/gripper_selection.py [--out DIR]
"""
import argparse
import logging
import tempfile
from pathlib import Path

from asmgen.scenarios import TABLE_ORDER, gripper_selection


def first_try(report):
    return "yes" if report.subtasks[0]["outcomes"][0] == "succeeded" else "no"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None, help="output directory (default: a temp dir)")
    args = ap.parse_args()
    # single-subtask plans trip the plan-shape warnings; they are expected here
    logging.getLogger("asmgen").setLevel(logging.ERROR)
    out = Path(args.out or tempfile.mkdtemp(prefix="asmgen-grippers-"))

    gld = gripper_selection(out / "gld", "gld")
    dld = gripper_selection(out / "dld", "dld")
    print(f"{'part':<10}{'GLD first try':<16}{'DLD first try':<16}DLD attempts")
    for part in TABLE_ORDER:
        print(f"{part:<10}{first_try(gld[part]):<16}{first_try(dld[part]):<16}"
              f"{dld[part].subtasks[0]['attempts']}")
    for part in TABLE_ORDER:
        for err in filter(None, dld[part].subtasks[0]["errors"]):
            print(f"\nDLD {part} failure:\n  " + err.replace("\n", "\n  "))


if __name__ == "__main__":
    main()
