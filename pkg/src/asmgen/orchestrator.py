"""The outer loop: decompose the task, then generate, test and commit one
script per subtask against a simulator running on its own thread."""
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .agent import AliasTable
from .assembly import load_assembly, load_workcell
from .errors import (AbortedRun, AttemptsExhausted, ConfigError, EmptyBlock, ProviderError,
                     SchemaError)
from .llm import CallLog, ProviderConfig, make_provider
from .planner import TaskDecomposer, validate_plan
from .script_agent import (DEFAULT_MAX_ATTEMPTS, SUCCEEDED, ExampleLibrary, ScriptAgent,
                           ScriptAttempt, attempts_jsonl, save)
from .sim import SimConfig, SimulationThread, Simulator

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    design: str
    workcell: str
    task: str = "Assemble the Skateboard Truck"
    provider: object = None  # selector string or ProviderConfig
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    parallel_sga: int = 1
    effect_check: bool = True
    out_dir: str = "out"
    seed: int = 0
    naming: str = "gld"
    continue_on_failure: bool = False
    detect_sigma: float = 0.0
    aliases: str | None = None
    model: str = "gpt-4"
    temperature: float | None = None

    def validate(self):
        if self.max_attempts < 1:
            raise ConfigError("max_attempts must be at least 1")
        if self.parallel_sga < 1:
            raise ConfigError("parallel_sga must be at least 1")
        if self.naming not in ("gld", "dld", "both"):
            raise ConfigError(f"unknown naming mode {self.naming!r}")


@dataclass
class RunReport:
    task: str
    status: str = "aborted"
    plan: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    subtasks: list = field(default_factory=list)
    provider_calls: int = 0
    discarded_drafts: int = 0
    scripts: list = field(default_factory=list)
    final_part_poses: dict = field(default_factory=dict)
    error: str | None = None
    wall_time_s: float = 0.0

    def to_dict(self):
        return asdict(self)

    def comparable(self):
        """The report without timing, for determinism checks."""
        d = self.to_dict()
        d.pop("wall_time_s")
        return d

    def to_markdown(self):
        lines = [f"# Run report: {self.task}", "", f"- status: {self.status}",
                 f"- subtasks: {len(self.plan)}", f"- provider calls: {self.provider_calls}",
                 f"- wall time: {self.wall_time_s:.2f} s"]
        if self.error:
            lines.append(f"- error: {self.error}")
        for w in self.warnings:
            lines.append(f"- warning: {w}")
        lines += ["", "| # | subtask | behavior | status | attempts | outcomes |",
                  "|---|---|---|---|---|---|"]
        for s in self.subtasks:
            lines.append(f"| {s['ordinal']} | {s['description']} | {s['behavior']} | "
                         f"{s['status']} | {s['attempts']} | {', '.join(s['outcomes'])} |")
        failures = [(s, i, e) for s in self.subtasks for i, e in enumerate(s["errors"], 1) if e]
        if failures:
            lines += ["", "## Errors", ""]
            for s, i, e in failures:
                lines += [f"### Subtask {s['ordinal']} attempt {i}", "", "```", e, "```", ""]
        return "\n".join(lines).rstrip() + "\n"

    def write(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(self.to_dict(), indent=2) + "\n",
                                         encoding="utf-8")
        (out / "report.md").write_text(self.to_markdown(), encoding="utf-8")


class SimProxy:
    """Forwards simulator calls to the simulation thread."""

    def __init__(self, thread):
        self._thread = thread

    def __getattr__(self, name):
        def forward(*args, **kwargs):
            return self._thread.call(lambda sim: getattr(sim, name)(*args, **kwargs))
        return forward


@dataclass
class _Draft:
    subtask: object
    agent: object
    source: str
    pre: dict
    ok: bool
    post: object = None


class Pipeline:
    def __init__(self, config, provider=None, library=None, examples=None):
        config.validate()
        self.config = config
        try:
            self.assembly = load_assembly(Path(config.design).read_text(encoding="utf-8"))
            self.workcell = load_workcell(Path(config.workcell).read_text(encoding="utf-8"),
                                          self.assembly)
        except (OSError, SchemaError) as exc:
            raise ConfigError(str(exc)) from exc
        if provider is None:
            pc = config.provider
            if pc is None:
                raise ConfigError("no provider configured")
            if isinstance(pc, str):
                try:
                    pc = ProviderConfig.parse(pc, model=config.model,
                                              temperature=config.temperature)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
            try:
                provider = make_provider(pc)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot open provider: {exc}") from exc
        self.provider = CallLog(provider)
        self.library = library or ExampleLibrary.load()
        self.examples = examples
        self.aliases = AliasTable.load(config.aliases) if config.aliases else AliasTable()
        self.out_dir = Path(config.out_dir)
        self.thread = None
        self.attempt_log = []

    # -- helpers ----------------------------------------------------------------

    def new_simulator(self):
        cfg = SimConfig(seed=self.config.seed, detect_sigma=self.config.detect_sigma)
        return Simulator(self.workcell, self.assembly, cfg)

    def _agent(self, subtask):
        return ScriptAgent(self.provider, subtask.behavior, self.assembly, self.workcell,
                           library=self.library, naming=self.config.naming,
                           aliases=self.aliases, model=self.config.model,
                           temperature=self.config.temperature)

    def _log_attempt(self, subtask, attempt, draft=False):
        rec = attempt.to_dict()
        rec["path"] = Path(rec["path"]).name if rec["path"] else None
        rec.update(ordinal=subtask.ordinal, draft=draft)
        rec.pop("source")
        self.attempt_log.append(rec)

    # -- entry points ---------------------------------------------------------------

    def run(self):
        """Decompose the configured task, then execute the plan."""
        start = time.monotonic()
        report = RunReport(self.config.task)
        tda = TaskDecomposer(self.provider, self.assembly, examples=self.examples,
                             naming=self.config.naming, aliases=self.aliases,
                             model=self.config.model, temperature=self.config.temperature)
        try:
            plan = tda.decompose(self.config.task)
        except Exception as exc:
            report.error = f"{type(exc).__name__}: {exc}"
            report.provider_calls = self.provider.count
            report.wall_time_s = time.monotonic() - start
            report.write(self.out_dir)
            raise AbortedRun(exc, report) from exc
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / "plan.json").write_text(plan.to_json() + "\n", encoding="utf-8")
        return self.run_plan(plan, start=start)

    def run_plan(self, plan, setup=None, start=None):
        """Generate and commit scripts for every subtask of ``plan`` in order.

        ``setup(sim)`` may prepare the live simulator before the first subtask.
        """
        start = time.monotonic() if start is None else start
        report = RunReport(plan.source_task or self.config.task)
        report.plan = [s.to_dict() for s in plan.subtasks]
        report.warnings = validate_plan(plan, self.assembly)
        for w in report.warnings:
            log.warning("plan: %s", w)
        records = {s.ordinal: {"ordinal": s.ordinal, "description": s.description,
                               "behavior": s.behavior, "parts": list(s.parts),
                               "status": s.status, "attempts": 0, "outcomes": [],
                               "errors": [], "script": None}
                   for s in plan.subtasks}
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.thread = SimulationThread(self.new_simulator()).start()
        sim = SimProxy(self.thread)
        failure = None
        try:
            if setup is not None:
                self.thread.call(setup)
            failure = self._loop(plan, sim, report, records)
            report.final_part_poses = {n: p["pose"]
                                       for n, p in sim.state_dict()["parts"].items()}
        finally:
            self.thread.stop()
            report.subtasks = [records[s.ordinal] for s in plan.subtasks]
            report.provider_calls = self.provider.count
            report.status = "complete" if failure is None and plan.all_done() else "aborted"
            report.wall_time_s = time.monotonic() - start
            report.write(self.out_dir)
            (self.out_dir / "attempts.jsonl").write_text(attempts_jsonl(self.attempt_log),
                                                         encoding="utf-8")
        if failure is not None:
            raise AbortedRun(failure, report)
        return report

    # -- the loop ---------------------------------------------------------------------

    def _record(self, report, records, subtask, attempts):
        rec = records[subtask.ordinal]
        rec["attempts"] = len(attempts)
        rec["outcomes"] = [a.outcome for a in attempts]
        rec["errors"] = [a.error for a in attempts]
        rec["status"] = subtask.status
        last = attempts[-1] if attempts else None
        if last is not None and last.outcome == SUCCEEDED:
            rec["script"] = Path(last.path).name
            report.scripts.append(rec["script"])

    def _run_one(self, subtask, agent, sim, first_source=None):
        attempts = []

        def note(st, attempt):
            attempts.append(attempt)
            self._log_attempt(st, attempt)

        try:
            agent.try_subtask(subtask, sim, self.config.max_attempts, self.out_dir,
                              self.config.effect_check, first_source=first_source,
                              error=subtask.error, on_attempt=note)
        except AttemptsExhausted as exc:
            return attempts, exc
        return attempts, None

    def _loop(self, plan, sim, report, records):
        """Process subtasks in plan order; returns the abort cause or None."""
        failure = None
        k = self.config.parallel_sga
        while plan.pending():
            window = sorted(plan.pending(), key=lambda s: s.ordinal)[:k]
            try:
                drafts = self._speculate(window, sim) if k > 1 else []
            except ProviderError as exc:
                return exc
            for i, subtask in enumerate(window):
                draft = drafts[i] if i < len(drafts) else None
                try:
                    if draft is not None and draft.pre == sim.state_dict():
                        attempts, exc = self._run_one(subtask, draft.agent, sim, draft.source)
                    else:
                        if draft is not None:
                            report.discarded_drafts += 1
                            log.info("draft for subtask %d is stale; regenerating",
                                     subtask.ordinal)
                        attempts, exc = self._run_one(subtask, self._agent(subtask), sim)
                except ProviderError as err:
                    subtask.status = "failed"
                    subtask.error = f"{type(err).__name__}: {err}"
                    records[subtask.ordinal]["status"] = "failed"
                    report.error = subtask.error
                    return err
                if exc is None:
                    plan.mark_done(subtask)
                    self._record(report, records, subtask, attempts)
                    continue
                subtask.status = "failed"
                subtask.error = attempts[-1].error
                self._record(report, records, subtask, attempts)
                report.error = str(exc)
                failure = exc
                if not self.config.continue_on_failure:
                    return failure
                break  # later drafts assumed this subtask's effects
        return failure

    def _speculate(self, window, sim):
        """First drafts for ``window``, each test-run on a private simulator
        restored from the state it is predicted to start from."""
        agents = [self._agent(s) for s in window]
        predicted = sim.checkpoint("speculation")
        drafts = []
        if getattr(self.provider, "ordered", True):
            # keep provider calls in plan order; stop at the first failing draft
            for s, a in zip(window, agents):
                d = self._test_draft(s, a, self._write(s, a), predicted)
                drafts.append(d)
                if not d.ok:
                    break
                predicted = d.post
            return drafts
        with ThreadPoolExecutor(max_workers=len(window)) as pool:
            sources = list(pool.map(self._write, window, agents))
        for s, a, src in zip(window, agents, sources):
            d = self._test_draft(s, a, src, predicted)
            drafts.append(d)
            if d.ok:
                predicted = d.post
        return drafts

    @staticmethod
    def _write(subtask, agent):
        try:
            return agent.write(subtask, subtask.error)
        except EmptyBlock:
            return ""

    def _test_draft(self, subtask, agent, source, predicted):
        private = self.new_simulator()
        private.restore(predicted)
        pre = private.state_dict()
        outcome, _err = agent.evaluate(source, subtask, private, self.config.effect_check)
        ok = outcome == SUCCEEDED
        return _Draft(subtask, agent, source, pre, ok, private.checkpoint("draft") if ok else None)


def run_pipeline(config, provider=None):
    return Pipeline(config, provider).run()


__all__ = ["Pipeline", "RunConfig", "RunReport", "ScriptAttempt", "SimProxy",
           "run_pipeline", "save"]
