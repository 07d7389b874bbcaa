"""Replay a Move subtask that needs two repairs before it runs cleanly.

    python3 demos/debugging_loop.py [--out DIR]
"""
import argparse
import logging
import tempfile
from pathlib import Path

from asmgen.scenarios import debugging_loop


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None, help="output directory (default: a temp dir)")
    args = ap.parse_args()
    # single-subtask plans trip the plan-shape warnings; they are expected here
    logging.getLogger("asmgen").setLevel(logging.ERROR)
    out = Path(args.out or tempfile.mkdtemp(prefix="asmgen-debug-"))

    report = debugging_loop(out)
    sub = report.subtasks[0]
    print(f"subtask: {sub['description']}")
    for i, (outcome, error) in enumerate(zip(sub["outcomes"], sub["errors"]), 1):
        print(f"\nattempt {i}: {outcome}")
        if error:
            print("  " + error.replace("\n", "\n  "))
    print(f"\nstatus {report.status}, {report.provider_calls} provider calls")
    for name in report.scripts:
        print(f"committed script: {out / name}")


if __name__ == "__main__":
    main()
