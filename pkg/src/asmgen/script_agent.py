"""Script generation: write, save, check and run one subtask's script,
repairing it from error feedback until it works."""
import json
import logging
import re
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from . import prompts
from .agent import Agent, ChatHistory, bootstrap
from .assembly import render_context
from .errors import AttemptsExhausted, EmptyBlock, IoError, MissingExample
from .sim.errors import RuntimeScriptError, SimError
from .wcs import default_catalog, extract_code_block, parse
from .wcs.checker import check
from .wcs.errors import ScriptError

log = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = 5
CHECK_FAILED = "check_failed"
RUNTIME_FAILED = "runtime_failed"
SUCCEEDED = "succeeded"


@dataclass(frozen=True)
class Example:
    behavior: str
    name: str
    description: str
    source: str


class ExampleLibrary:
    """Worked scripts filed by behavior: ``<Behavior>/<nn>_<name>.wcs`` plus a ``.md``."""

    def __init__(self, examples=None):
        self.examples = {}
        for ex in examples or ():
            self.examples.setdefault(ex.behavior, []).append(ex)

    @classmethod
    def load(cls, path=None):
        root = resources.files("asmgen.data").joinpath("library") if path is None else Path(path)
        found = []
        for bdir in sorted((d for d in root.iterdir() if d.is_dir()), key=lambda d: d.name):
            for f in sorted((f for f in bdir.iterdir() if f.name.endswith(".wcs")),
                            key=lambda f: f.name):
                md = bdir.joinpath(f.name[:-4] + ".md")
                desc = md.read_text(encoding="utf-8") if md.is_file() else ""
                found.append(Example(bdir.name, f.name[:-4], desc, f.read_text(encoding="utf-8")))
        return cls(found)

    def for_behavior(self, behavior):
        items = self.examples.get(behavior, [])
        if not items:
            raise MissingExample(f"no example scripts filed under behavior {behavior!r}")
        return list(items)


@dataclass
class ScriptAttempt:
    attempt_no: int
    source: str
    outcome: str
    error: str | None = None
    path: str | None = None

    def to_dict(self):
        return asdict(self)


def api_docs(api=None):
    return (api or default_catalog()).render_docs() + "\n" + prompts.WCS_SUMMARY


def build_sga_context(behavior, assembly, workcell, docs, library, naming="gld",
                      role=prompts.SGA_ROLE, rules=prompts.SGA_RULES):
    """Bootstrap (R, L) guidelines and (A, W, D, E...) context for one behavior."""
    examples = library.for_behavior(behavior)
    context = [
        render_context(assembly, naming=naming),
        render_context(workcell, naming=naming, assembly=assembly),
        docs,
    ]
    context += [prompts.sga_example(e.behavior, e.name, e.description, e.source)
                for e in examples]
    return bootstrap(ChatHistory(), [role, rules], context)


def script_path(out_dir, subtask):
    slug = re.sub(r"[^a-z0-9]", "_", subtask.description.lower())
    return Path(out_dir) / f"{subtask.ordinal:03d}_{subtask.behavior.lower()}_{slug}.wcs"


def save(source, subtask, out_dir):
    path = script_path(out_dir, subtask)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(source if source.endswith("\n") else source + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def effect_problem(subtask, sim, result):
    """Why a script that ran cleanly did not do what its behavior promises (or None)."""
    names = []
    for p in subtask.parts:
        try:
            names.append(sim.part_name(p))
        except SimError as exc:
            return f"subtask names part {p!r} which the workcell does not have ({exc})"
    ops = [(e["op"], e.get("part")) for e in result.events]
    b = subtask.behavior
    if b == "Pick":
        for n in names[:1]:
            if sim.holder(n) is None:
                return f"after the script, no robot is holding {n!r}"
    elif b in ("Place", "Insert"):
        for n in names[:1]:
            if not any(op in ("place", "insert") and part == n for op, part in ops):
                return f"the script never placed or inserted {n!r}"
            if sim.holder(n) is not None:
                return f"{n!r} is still held after the script"
    elif b == "Detect":
        for n in names:
            if ("detect", n) not in ops:
                return f"the script never detected {n!r}"
        if not names and not any(op == "detect" for op, _ in ops):
            return "the script never called detect"
    elif b == "Move":
        if not any(op == "move" for op, _ in ops):
            return "no motion command succeeded"
    return None


class ScriptAgent(Agent):
    """One agent per subtask; its history accumulates scripts and their errors."""

    def __init__(self, provider, behavior, assembly, workcell, library=None, docs=None,
                 naming="gld", aliases=None, model="gpt-4", temperature=None, api=None):
        super().__init__(provider, aliases, model, temperature)
        self.behavior = behavior
        self.api = api or default_catalog()
        self.history = build_sga_context(
            behavior, assembly, workcell, docs or api_docs(self.api),
            library or ExampleLibrary.load(), naming=naming)

    def write(self, subtask, error=None):
        reply = self.ask(prompts.sga_request(subtask, error))
        return extract_code_block(reply)

    def evaluate(self, source, subtask, sim, effect_check=True):
        """Parse, check and run ``source``; returns ``(outcome, error text)``."""
        try:
            script = parse(source)
        except ScriptError as exc:
            return CHECK_FAILED, exc.feedback()
        problems = check(script, self.api)
        if problems:
            return CHECK_FAILED, "\n".join(p.feedback() for p in problems)
        entry = sim.checkpoint("pre-run")
        try:
            result = sim.run_script(script, self.api)
        except RuntimeScriptError as exc:
            return RUNTIME_FAILED, exc.feedback()
        if effect_check:
            problem = effect_problem(subtask, sim, result)
            if problem:
                sim.restore(entry)
                return RUNTIME_FAILED, f"EffectCheck: {problem}"
        return SUCCEEDED, None

    def try_subtask(self, subtask, sim, max_attempts=DEFAULT_MAX_ATTEMPTS, out_dir=None,
                    effect_check=True, first_source=None, error=None, on_attempt=None):
        """Loop write -> save -> parse -> check -> run until a script works.

        ``first_source`` lets a draft generated earlier stand in for the first
        write.  Raises :class:`AttemptsExhausted` after ``max_attempts``.
        """
        if max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        attempts = []
        for n in range(1, max_attempts + 1):
            try:
                if n == 1 and first_source is not None:
                    source = first_source
                else:
                    source = self.write(subtask, error)
            except EmptyBlock as exc:
                source, empty = "", f"EmptyBlock: {exc}"
            else:
                empty = None
            path = str(save(source, subtask, out_dir)) if out_dir is not None else None
            if empty:
                outcome, error = CHECK_FAILED, empty
            else:
                outcome, error = self.evaluate(source, subtask, sim, effect_check)
            attempt = ScriptAttempt(n, source, outcome, error, path)
            attempts.append(attempt)
            if on_attempt is not None:
                on_attempt(subtask, attempt)
            log.info("subtask %d attempt %d: %s", subtask.ordinal, n, outcome)
            if outcome == SUCCEEDED:
                return attempt
        raise AttemptsExhausted(subtask, attempts)


def attempts_jsonl(records):
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
