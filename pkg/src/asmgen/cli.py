"""Command-line entry point: ``asmgen decompose|run|exec``."""
import argparse
import json
import logging
import sys
from pathlib import Path

from .assembly import load_assembly, load_workcell
from .errors import (AbortedRun, AsmGenError, ConfigError, PlanError, ProviderError,
                     SchemaError, UnknownPart)
from .llm import ProviderConfig, make_provider
from .orchestrator import Pipeline, RunConfig
from .planner import TaskDecomposer, validate_plan
from .sim import RuntimeScriptError, SimConfig, Simulator
from .sim.errors import SimError
from .wcs import ScriptError, check, parse
from .wcs.parser import decode_source

log = logging.getLogger("asmgen")

EXIT_OK, EXIT_ERROR, EXIT_ABORTED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _provider(value):
    try:
        ProviderConfig.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return value


def build_parser():
    p = _Parser(prog="asmgen", description="Generate and test robot assembly scripts.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--design", required=True, help="assembly JSON")
        sp.add_argument("--workcell", required=True, help="workcell JSON")
        sp.add_argument("--task", required=True, help="task request text")
        sp.add_argument("--provider", required=True, type=_provider,
                        help="http:[URL], replay:PATH or record:PATH")
        sp.add_argument("--model", default="gpt-4")
        sp.add_argument("--temperature", type=float, default=None)
        sp.add_argument("--naming", choices=("gld", "dld", "both"), default="gld",
                        help="how parts are named in prompts (default gld)")
        sp.add_argument("--aliases", default=None, help="aliases.json for prompt redaction")
        sp.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("decompose", help="run task decomposition only")
    common(d)
    d.add_argument("--out", default=None, help="write the plan JSON here (default stdout)")

    r = sub.add_parser("run", help="run the whole pipeline")
    common(r)
    r.add_argument("--max-attempts", type=int, default=5)
    r.add_argument("--parallel-sga", type=int, default=1)
    r.add_argument("--no-effect-check", action="store_true")
    r.add_argument("--continue-on-failure", action="store_true")
    r.add_argument("--detect-sigma", type=float, default=0.0)
    r.add_argument("--out", required=True, help="output directory")

    e = sub.add_parser("exec", help="check and run one script")
    e.add_argument("script")
    e.add_argument("--workcell", required=True)
    e.add_argument("--design", default=None, help="assembly JSON (enables insert and GLD names)")
    e.add_argument("--state", default=None, help="start from a state dump")
    e.add_argument("--dump-state", default=None, help="write the resulting state here")
    e.add_argument("--seed", type=int, default=0)
    return p


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def cmd_decompose(args):
    assembly = load_assembly(_read(args.design))
    load_workcell(_read(args.workcell), assembly)
    cfg = ProviderConfig.parse(args.provider, model=args.model, temperature=args.temperature)
    tda = TaskDecomposer(make_provider(cfg), assembly, naming=args.naming,
                         model=args.model, temperature=args.temperature)
    plan = tda.decompose(args.task)
    for w in validate_plan(plan, assembly):
        print(f"warning: {w}", file=sys.stderr)
    text = plan.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args):
    config = RunConfig(
        design=args.design, workcell=args.workcell, task=args.task, provider=args.provider,
        max_attempts=args.max_attempts, parallel_sga=args.parallel_sga,
        effect_check=not args.no_effect_check, out_dir=args.out, seed=args.seed,
        naming=args.naming, continue_on_failure=args.continue_on_failure,
        detect_sigma=args.detect_sigma, aliases=args.aliases, model=args.model,
        temperature=args.temperature)
    try:
        report = Pipeline(config).run()
    except AbortedRun as exc:
        print(f"aborted: {exc.cause}", file=sys.stderr)
        print(f"report: {Path(args.out) / 'report.md'}", file=sys.stderr)
        return EXIT_ABORTED
    print(f"complete: {len(report.scripts)} scripts in {args.out}")
    return EXIT_OK


def cmd_exec(args):
    assembly = load_assembly(_read(args.design)) if args.design else None
    workcell = load_workcell(_read(args.workcell), assembly)
    sim = Simulator(workcell, assembly, SimConfig(seed=args.seed))
    if args.state:
        sim.load_state(json.loads(_read(args.state)))
    try:
        raw = Path(args.script).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.script}: {exc}") from exc
    try:
        script = parse(decode_source(raw))
        problems = check(script)
        if problems:
            for p in problems:
                print(p.feedback(), file=sys.stderr)
            return EXIT_ERROR
        result = sim.run_script(script)
    except (ScriptError, RuntimeScriptError) as exc:
        print(exc.feedback(), file=sys.stderr)
        return EXIT_ERROR
    for line in result.output:
        print(line)
    sys.stdout.write(sim.summary())
    if args.dump_state:
        Path(args.dump_state).write_text(sim.dump_state() + "\n", encoding="utf-8")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    handler = {"decompose": cmd_decompose, "run": cmd_run, "exec": cmd_exec}[args.command]
    try:
        return handler(args)
    except (ConfigError, SchemaError, PlanError, UnknownPart, ProviderError, SimError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except AsmGenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
