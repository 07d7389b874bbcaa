"""Assemble the whole skateboard truck from the golden transcript: task
decomposition, one script per subtask, and the final report.

    python3 demos/golden_truck.py [--out DIR] [--parallel-sga K]
"""
import argparse
import tempfile
from pathlib import Path

from asmgen.scenarios import golden_truck


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None, help="output directory (default: a temp dir)")
    ap.add_argument("--parallel-sga", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out or tempfile.mkdtemp(prefix="asmgen-truck-"))

    report, _pipe = golden_truck(out, parallel_sga=args.parallel_sga)
    print(report.to_markdown())
    print(f"scripts and report written to {out}")


if __name__ == "__main__":
    main()
