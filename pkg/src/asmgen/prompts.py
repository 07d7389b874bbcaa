"""Fixed prompt texts for the two agents."""

TDA_ROLE = """\
You plan robotic assembly jobs. Given an assembly dictionary, a list of its parts and a
catalog of robot behaviors, you break a user's request into a short ordered list of
steps that a two-arm workcell can execute one at a time."""

TDA_RULES = """\
Answer with a JSON array and nothing else. Each element is an object with exactly
three keys:
  "subtask": a short imperative description, for example "Pick the baseplate"
  "behavior": one label from the behavior list
  "parts": the part names the step acts on, spelled exactly as in the part list
Order the steps so every part is detected before it is picked and picked before it
is placed or inserted. A part is inserted onto a part that is already in place and
adjacent to it in the assembly dictionary. List the moved part first in "parts"."""

SGA_ROLE = """\
You write workcell scripts (WCS) that drive simulated robots. Each request names
one subtask and its behavior. Reply with one complete script that performs exactly
that subtask and nothing more."""

SGA_RULES = """\
Script rules:
- Put the script in a single fenced code block marked wcs.
- Start with the line: from workcell_api import *
- Define def main(workcell): with a docstring naming the subtask.
- Declare every variable with let before assigning to it again.
- Call only the functions listed in the API reference; poses compose with @.
- Use the part, gripper, station and robot names exactly as they appear in the
  assembly and workcell dictionaries.
- Move to a safe height above a location before descending to it, and retract
  the robot when the subtask is finished.
- When an error report follows your script, fix the cause and reply with the
  whole corrected script."""

WCS_SUMMARY = """\
WCS language summary:
- Python-like indentation; statements: let NAME = EXPR, NAME = EXPR, calls,
  print(...), pass, return, raise Exception("text"), if/elif/else,
  for NAME in range(...), try/except [ErrorName [as NAME]].
- Values: numbers, double-quoted strings, True/False/None, lists, poses,
  robots and the workcell. Arithmetic: + - * /; pose composition: a @ b.
- Comments start with #; a triple-quoted string may document a function."""


def tda_part_list(names):
    return "Parts:\n" + "\n".join(f"- {n}" for n in names)


def tda_behavior_list(behaviors):
    return "Behaviors: " + ", ".join(behaviors)


def tda_examples(examples):
    """Render few-shot (task, plan JSON) pairs as one block."""
    blocks = ["Examples:"]
    for i, (task, plan_json) in enumerate(examples, 1):
        blocks.append(f"Example {i}\nTask: {task}\nPlan:\n{plan_json}")
    return "\n\n".join(blocks)


def tda_request(task):
    return f"Task: {task}"


def tda_reask(error):
    return (f"Your plan could not be read: {error}\n"
            "Reply again with only the JSON array in the required format.")


def sga_example(behavior, name, description, source):
    return (f"Example script for behavior {behavior} ({name}):\n{description.strip()}\n\n"
            f"```wcs\n{source.rstrip()}\n```")


def sga_request(subtask, error=None):
    parts = ", ".join(subtask.parts) if subtask.parts else "none"
    text = (f"Subtask: {subtask.description}\nBehavior: {subtask.behavior}\n"
            f"Parts: {parts}")
    if error:
        text += ("\n\nThe previous script failed with this error:\n"
                 f"{error}\nReply with the corrected script.")
    return text
