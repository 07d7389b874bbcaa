"""Decompose the truck task against a live OpenAI-compatible endpoint.

Nothing is asserted: the plan (or the error) is logged so a person can look
at it.  The API key is read from the ASM_LLM_API_KEY environment variable.

    ASM_LLM_API_KEY=... python3 demos/live_smoke.py [--endpoint URL] [--model NAME]
"""
import argparse
import logging
import os

from asmgen.cli import main as cli_main
from asmgen.llm import DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT
from asmgen.scenarios import TRUCK_TASK, fixture_paths

log = logging.getLogger("live_smoke")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--endpoint", default=DEFAULT_ENDPOINT)
    ap.add_argument("--model", default="gpt-4")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")

    if DEFAULT_API_KEY_ENV not in os.environ:
        log.info("%s is not set; skipping the live smoke test", DEFAULT_API_KEY_ENV)
        return 0
    design, workcell = fixture_paths()
    argv = ["decompose", "--design", design, "--workcell", workcell, "--task", TRUCK_TASK,
            "--provider", f"http:{args.endpoint}", "--model", args.model]
    code = cli_main(argv)
    log.info("decompose exited with %s", code)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
