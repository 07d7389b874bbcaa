"""Generate, test and repair robot assembly scripts with a chat model in the loop."""
from .assembly import AssemblySpec, WorkcellSpec, load_assembly, load_workcell, render_context
from .orchestrator import Pipeline, RunConfig, RunReport, run_pipeline
from .planner import BEHAVIORS, Subtask, SubtaskPlan, TaskDecomposer, parse_plan, validate_plan
from .pose import Pose, compose, invert
from .script_agent import ScriptAgent, ScriptAttempt
from .sim import Simulator

__version__ = "0.1.0"

__all__ = [
    "AssemblySpec", "WorkcellSpec", "load_assembly", "load_workcell", "render_context",
    "Pipeline", "RunConfig", "RunReport", "run_pipeline", "BEHAVIORS", "Subtask",
    "SubtaskPlan", "TaskDecomposer", "parse_plan", "validate_plan", "Pose", "compose",
    "invert", "ScriptAgent", "ScriptAttempt", "Simulator",
]
