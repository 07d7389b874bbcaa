"""Task decomposition: turn a task request into a behavior-labelled plan."""
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import prompts
from .agent import Agent, ChatHistory, bootstrap
from .assembly import render_context
from .errors import (EmptyBlock, PlanExhausted, PlanParseError, UnknownBehavior,
                     UnknownPart)
from .wcs.extract import extract_code_block

log = logging.getLogger(__name__)

BEHAVIORS = ("Detect", "Pick", "Move", "Place", "Insert")
STATUSES = ("pending", "done", "failed")
MAX_REASKS = 2


@dataclass
class Subtask:
    description: str
    behavior: str
    parts: list
    ordinal: int
    status: str = "pending"
    error: str | None = None

    def to_dict(self):
        return {"subtask": self.description, "behavior": self.behavior,
                "parts": list(self.parts)}


@dataclass
class SubtaskPlan:
    subtasks: list = field(default_factory=list)
    source_task: str = ""

    def all_done(self):
        return all(s.status == "done" for s in self.subtasks)

    def pending(self):
        return [s for s in self.subtasks if s.status == "pending"]

    def get_next(self):
        """Lowest-ordinal pending subtask as ``(subtask, behavior, error)``."""
        todo = self.pending()
        if not todo:
            raise PlanExhausted("no pending subtasks")
        s = min(todo, key=lambda s: s.ordinal)
        return s, s.behavior, s.error

    def mark_done(self, subtask):
        subtask.status = "done"
        subtask.error = None

    def to_json(self):
        return json.dumps([s.to_dict() for s in self.subtasks], indent=2)

    def __len__(self):
        return len(self.subtasks)


def parse_plan(text, source_task=""):
    """Strictly parse the JSON plan format; ordinals follow list position."""
    if not isinstance(text, str) or not text.strip():
        raise PlanParseError("empty response", "", text if isinstance(text, str) else "")
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, RecursionError) as exc:
        loc = f"line {exc.lineno}, column {exc.colno}" if hasattr(exc, "lineno") else ""
        raise PlanParseError(f"invalid JSON: {getattr(exc, 'msg', exc)}", loc, text) from None
    if not isinstance(data, list):
        raise PlanParseError("plan must be a JSON array", "$", text)
    subtasks = []
    for i, item in enumerate(data):
        where = f"[{i}]"
        if not isinstance(item, dict):
            raise PlanParseError("each step must be an object", where, text)
        extra = sorted(set(item) - {"subtask", "behavior", "parts"})
        if extra:
            raise PlanParseError(f"unexpected key {extra[0]!r}", where, text)
        desc = item.get("subtask")
        if not isinstance(desc, str) or not desc.strip():
            raise PlanParseError("'subtask' must be a nonempty string", f"{where}.subtask", text)
        behavior = item.get("behavior")
        if not isinstance(behavior, str) or not behavior:
            raise PlanParseError("'behavior' must be a nonempty string",
                                 f"{where}.behavior", text)
        parts = item.get("parts", None)
        if not isinstance(parts, list):
            raise PlanParseError("'parts' must be an array", f"{where}.parts", text)
        for j, p in enumerate(parts):
            if not isinstance(p, str) or not p:
                raise PlanParseError("part names must be nonempty strings",
                                     f"{where}.parts[{j}]", text)
        subtasks.append(Subtask(desc.strip(), behavior, list(parts), i + 1))
    return SubtaskPlan(subtasks, source_task)


def resolve_plan(plan, assembly, behaviors=BEHAVIORS):
    """Raise on labels outside the catalog or parts the assembly lacks."""
    for s in plan.subtasks:
        if s.behavior not in behaviors:
            raise UnknownBehavior(
                f"subtask {s.ordinal} uses behavior {s.behavior!r}; "
                f"allowed: {', '.join(behaviors)}")
        for p in s.parts:
            assembly.resolve(p)
    return plan


def validate_plan(plan, assembly):
    """Soft checks on ordering and size; returns warning strings."""
    warnings = []
    resolved = [[_try_resolve(assembly, p) for p in s.parts] for s in plan.subtasks]
    for i, s in enumerate(plan.subtasks):
        if s.behavior == "Pick":
            for p in resolved[i]:
                later = any(t.behavior in ("Place", "Insert") and p in resolved[j]
                            for j, t in enumerate(plan.subtasks) if j > i)
                if not later:
                    warnings.append(f"subtask {s.ordinal}: {p!r} is picked but never "
                                    "placed or inserted afterwards")
        if s.behavior == "Insert" and len(resolved[i]) >= 2:
            a, b = resolved[i][0], resolved[i][1]
            if a in assembly.names() and b in assembly.names() and not assembly.adjacent(a, b):
                warnings.append(f"subtask {s.ordinal}: inserts {a!r} into {b!r}, "
                                "which are not adjacent in the assembly")
    n = len(assembly.parts)
    if n and not 2 * n <= len(plan.subtasks) <= 8 * n:
        warnings.append(f"plan has {len(plan.subtasks)} subtasks for {n} parts "
                        f"(expected {2 * n} to {8 * n})")
    return warnings


def _try_resolve(assembly, name):
    try:
        return assembly.resolve(name)
    except UnknownPart:
        return name


# -- few-shot examples ----------------------------------------------------------

def load_examples(path=None):
    """(task, plan JSON text) pairs from a directory of ``{task, plan}`` files."""
    if path is None:
        root = resources.files("asmgen.data").joinpath("tda_examples")
        files = sorted((f for f in root.iterdir() if f.name.endswith(".json")),
                       key=lambda f: f.name)
    else:
        files = sorted(Path(path).glob("*.json"))
    out = []
    for f in files:
        doc = json.loads(f.read_text(encoding="utf-8"))
        out.append((doc["task"], json.dumps(doc["plan"], indent=2)))
    return out


def part_labels(assembly, naming):
    return [p.label if naming == "gld" else p.name for p in assembly.parts]


def build_tda_context(assembly, part_names, behaviors, examples,
                      rules=prompts.TDA_RULES, role=prompts.TDA_ROLE, naming="gld"):
    if not examples:
        raise ValueError("the decomposer needs at least one few-shot example")
    history = ChatHistory()
    return bootstrap(history, [role, rules], [
        render_context(assembly, naming=naming),
        prompts.tda_part_list(part_names),
        prompts.tda_behavior_list(behaviors),
        prompts.tda_examples(examples),
    ])


class TaskDecomposer(Agent):
    def __init__(self, provider, assembly, examples=None, behaviors=BEHAVIORS,
                 naming="gld", aliases=None, model="gpt-4", temperature=None,
                 max_reasks=MAX_REASKS):
        super().__init__(provider, aliases, model, temperature)
        self.assembly = assembly
        self.behaviors = tuple(behaviors)
        self.max_reasks = max_reasks
        self.history = build_tda_context(
            assembly, part_labels(assembly, naming), self.behaviors,
            examples if examples is not None else load_examples(), naming=naming)

    def decompose(self, task):
        prompt = prompts.tda_request(task)
        for attempt in range(self.max_reasks + 1):
            reply = self.ask(prompt)
            try:
                plan = parse_plan(_strip_fence(reply), task)
                break
            except PlanParseError as exc:
                log.warning("plan parse failed (attempt %d): %s", attempt + 1, exc)
                if attempt == self.max_reasks:
                    raise
                prompt = prompts.tda_reask(exc)
        return resolve_plan(plan, self.assembly, self.behaviors)


def decompose(history, task, provider, assembly, behaviors=BEHAVIORS):
    """One-shot decomposition against an already bootstrapped history."""
    agent = Agent(provider)
    agent.history = history
    reply = agent.ask(prompts.tda_request(task))
    return resolve_plan(parse_plan(_strip_fence(reply), task), assembly, behaviors)


def _strip_fence(reply):
    try:
        return extract_code_block(reply)
    except EmptyBlock:
        return ""


__all__ = ["BEHAVIORS", "Subtask", "SubtaskPlan", "TaskDecomposer",
           "build_tda_context", "decompose", "load_examples", "parse_plan",
           "resolve_plan", "validate_plan"]
