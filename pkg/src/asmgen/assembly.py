"""Assembly and workcell data model: JSON ingestion, validation, rendering.

Both documents encode poses as flat 16-element row-major arrays
(meters, radians).  See ``docs/schemas.md`` for the full schema.
"""
import json
import math
from dataclasses import dataclass, field, replace

from .errors import AssemblyReferenceError, SchemaError, UnknownPart
from .pose import Pose, PoseError, to_rpy

DEFAULT_PART_HALF_EXTENTS = (0.02, 0.02, 0.02)
STATION_KINDS = ("bin", "kit", "vise", "rack")


@dataclass(frozen=True)
class PartSpec:
    name: str
    part_class: str
    design_pose: Pose
    gld: str = ""
    mass: float = 0.0
    adjacent: tuple = ()
    joints: tuple = ()  # (other_part, joint_kind) pairs
    subassembly: str | None = None
    half_extents: tuple = DEFAULT_PART_HALF_EXTENTS

    @property
    def label(self):
        return self.gld or self.name


@dataclass(frozen=True)
class AssemblySpec:
    assembly_name: str
    origin_frame: Pose
    parts: tuple = ()

    def names(self):
        return [p.name for p in self.parts]

    def part(self, name):
        for p in self.parts:
            if p.name == name:
                return p
        raise UnknownPart(name)

    def resolve(self, ident):
        """Map a part name, or a unique GLD, to the canonical part name."""
        for p in self.parts:
            if p.name == ident:
                return p.name
        hits = [p.name for p in self.parts if p.gld == ident]
        if len(hits) == 1:
            return hits[0]
        if hits:
            raise UnknownPart(ident, f"ambiguous part description {ident!r} matches {hits}")
        raise UnknownPart(ident)

    def adjacent(self, a, b):
        return b in self.part(a).adjacent


@dataclass(frozen=True)
class GripperSpec:
    name: str
    description: str
    compatible_classes: tuple
    grasp_offset: Pose


@dataclass(frozen=True)
class RobotSpec:
    name: str
    base_pose: Pose
    workspace_min: tuple
    workspace_max: tuple
    retract_pose: Pose


@dataclass(frozen=True)
class RackSlot:
    slot_pose: Pose
    gripper: GripperSpec


@dataclass(frozen=True)
class StationSpec:
    """A fixture.  ``pose`` is the centre of its top face; the collision
    box of size ``2 * half_extents`` hangs below that point."""

    name: str
    pose: Pose
    kind: str
    half_extents: tuple = (0.05, 0.05, 0.05)


@dataclass(frozen=True)
class WorkcellSpec:
    robots: tuple = ()
    tool_rack: tuple = ()
    stations: tuple = ()
    initial_part_locations: dict = field(default_factory=dict)

    def robot(self, name):
        for r in self.robots:
            if r.name == name:
                return r
        raise KeyError(name)

    def station(self, name):
        for s in self.stations:
            if s.name == name:
                return s
        raise KeyError(name)

    def gripper(self, name):
        for slot in self.tool_rack:
            if slot.gripper.name == name:
                return slot.gripper
        raise KeyError(name)

    def grippers(self):
        return [slot.gripper for slot in self.tool_rack]


# -- JSON reading -----------------------------------------------------------------

def _get(obj, key, path, kind, default=...):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    here = f"{path}.{key}" if path else key
    if key not in obj:
        if default is ...:
            raise SchemaError(here, "missing field")
        return default
    return _typed(obj[key], here, kind)


def _typed(value, path, kind):
    if kind == "str":
        if not isinstance(value, str):
            raise SchemaError(path, "expected a string")
    elif kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(path, "expected a number")
        value = float(value)
        if not math.isfinite(value):
            raise SchemaError(path, "expected a finite number")
    elif kind == "list":
        if not isinstance(value, list):
            raise SchemaError(path, "expected an array")
    elif kind == "dict":
        if not isinstance(value, dict):
            raise SchemaError(path, "expected an object")
    elif kind == "pose":
        value = _pose(value, path)
    elif kind == "vec3":
        if not isinstance(value, list) or len(value) != 3:
            raise SchemaError(path, "expected an array of 3 numbers")
        value = tuple(_typed(v, f"{path}[{i}]", "number") for i, v in enumerate(value))
    return value


def _pose(value, path):
    if not isinstance(value, list) or len(value) != 16:
        raise SchemaError(path, "expected a 16-element row-major pose array")
    nums = [_typed(v, f"{path}[{i}]", "number") for i, v in enumerate(value)]
    try:
        return Pose.from_list(nums)
    except PoseError as exc:
        raise SchemaError(path, str(exc)) from None


def _str_list(items, path):
    return tuple(_typed(v, f"{path}[{i}]", "str") for i, v in enumerate(items))


def _parse_json(document):
    if isinstance(document, (dict, list)):
        return document
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None


def load_assembly(document):
    """Parse and validate an assembly document (JSON text or decoded dict)."""
    doc = _parse_json(document)
    if not isinstance(doc, dict):
        raise SchemaError("", "top level must be an object")
    name = _get(doc, "assembly_name", "", "str")
    origin = _get(doc, "origin_frame", "", "pose")
    raw_parts = _get(doc, "parts", "", "list")

    parts = []
    seen = set()
    for i, raw in enumerate(raw_parts):
        path = f"parts[{i}]"
        pname = _get(raw, "name", path, "str")
        if not pname:
            raise SchemaError(f"{path}.name", "part name must be nonempty")
        if pname in seen:
            raise SchemaError(f"{path}.name", f"duplicate part name {pname!r}")
        seen.add(pname)
        joints = []
        for j, rj in enumerate(_get(raw, "joints", path, "list", [])):
            jp = f"{path}.joints[{j}]"
            joints.append((_get(rj, "part", jp, "str"), _get(rj, "kind", jp, "str")))
        sub = raw.get("subassembly")
        if sub is not None:
            sub = _typed(sub, f"{path}.subassembly", "str")
        mass = _get(raw, "mass", path, "number", 0.0)
        if mass < 0:
            raise SchemaError(f"{path}.mass", "mass must be >= 0")
        half = _get(raw, "half_extents", path, "vec3", DEFAULT_PART_HALF_EXTENTS)
        if any(h <= 0 for h in half):
            raise SchemaError(f"{path}.half_extents", "extents must be positive")
        gld = _get(raw, "gld", path, "str", "") or pname
        parts.append(PartSpec(
            name=pname,
            part_class=_get(raw, "part_class", path, "str"),
            design_pose=_get(raw, "design_pose", path, "pose"),
            gld=gld,
            mass=mass,
            adjacent=_str_list(_get(raw, "adjacent", path, "list", []), f"{path}.adjacent"),
            joints=tuple(joints),
            subassembly=sub,
            half_extents=tuple(half),
        ))

    # references, then symmetry
    for i, p in enumerate(parts):
        for j, other in enumerate(p.adjacent):
            if other not in seen:
                raise AssemblyReferenceError(
                    f"parts[{i}].adjacent[{j}]", f"unknown part {other!r}")
        for j, (other, _kind) in enumerate(p.joints):
            if other not in seen:
                raise AssemblyReferenceError(
                    f"parts[{i}].joints[{j}].part", f"unknown part {other!r}")
    by_name = {p.name: p for p in parts}
    for i, p in enumerate(parts):
        for j, other in enumerate(p.adjacent):
            if p.name not in by_name[other].adjacent:
                raise SchemaError(
                    f"parts[{i}].adjacent[{j}]",
                    f"adjacency is not symmetric: {other!r} does not list {p.name!r}")
    return AssemblySpec(assembly_name=name, origin_frame=origin, parts=tuple(parts))


def load_workcell(document, assembly=None):
    """Parse and validate a workcell document.

    When ``assembly`` is given, every key of ``initial_part_locations``
    must name one of its parts.
    """
    doc = _parse_json(document)
    if not isinstance(doc, dict):
        raise SchemaError("", "top level must be an object")

    robots = []
    for i, raw in enumerate(_get(doc, "robots", "", "list")):
        path = f"robots[{i}]"
        ws = _get(raw, "workspace", path, "dict")
        lo = _get(ws, "min", f"{path}.workspace", "vec3")
        hi = _get(ws, "max", f"{path}.workspace", "vec3")
        if any(a > b for a, b in zip(lo, hi)):
            raise SchemaError(f"{path}.workspace", "min must not exceed max")
        robots.append(RobotSpec(
            name=_get(raw, "name", path, "str"),
            base_pose=_get(raw, "base_pose", path, "pose"),
            workspace_min=lo,
            workspace_max=hi,
            retract_pose=_get(raw, "retract_pose", path, "pose"),
        ))
    _unique([r.name for r in robots], "robots", "robot")

    rack = []
    for i, raw in enumerate(_get(doc, "tool_rack", "", "list")):
        path = f"tool_rack[{i}]"
        g = _get(raw, "gripper", path, "dict")
        gp = f"{path}.gripper"
        rack.append(RackSlot(
            slot_pose=_get(raw, "slot_pose", path, "pose"),
            gripper=GripperSpec(
                name=_get(g, "name", gp, "str"),
                description=_get(g, "description", gp, "str"),
                compatible_classes=_str_list(
                    _get(g, "compatible_classes", gp, "list"), f"{gp}.compatible_classes"),
                grasp_offset=_get(g, "grasp_offset", gp, "pose"),
            ),
        ))
    _unique([s.gripper.name for s in rack], "tool_rack", "gripper")

    stations = []
    for i, raw in enumerate(_get(doc, "stations", "", "list")):
        path = f"stations[{i}]"
        kind = _get(raw, "kind", path, "str")
        if kind not in STATION_KINDS:
            raise SchemaError(f"{path}.kind", f"must be one of {', '.join(STATION_KINDS)}")
        stations.append(StationSpec(
            name=_get(raw, "name", path, "str"),
            pose=_get(raw, "pose", path, "pose"),
            kind=kind,
            half_extents=_get(raw, "half_extents", path, "vec3", (0.05, 0.05, 0.05)),
        ))
    _unique([s.name for s in stations], "stations", "station")

    locations = {}
    for key, value in _get(doc, "initial_part_locations", "", "dict", {}).items():
        path = f"initial_part_locations.{key}"
        if assembly is not None and key not in assembly.names():
            raise AssemblyReferenceError(path, f"unknown part {key!r}")
        locations[key] = _pose(value, path)

    return WorkcellSpec(
        robots=tuple(robots),
        tool_rack=tuple(rack),
        stations=tuple(stations),
        initial_part_locations=locations,
    )


def _unique(names, path, what):
    seen = set()
    for i, n in enumerate(names):
        if n in seen:
            raise SchemaError(f"{path}[{i}]", f"duplicate {what} name {n!r}")
        seen.add(n)


def annotate_gld(spec, annotations):
    """Return a copy of ``spec`` with the given parts' GLD replaced."""
    names = set(spec.names())
    for key in annotations:
        if key not in names:
            raise UnknownPart(key)
    parts = tuple(
        replace(p, gld=annotations[p.name]) if p.name in annotations else p
        for p in spec.parts
    )
    return replace(spec, parts=parts)


# -- JSON writing -----------------------------------------------------------------

def assembly_to_dict(spec):
    parts = []
    for p in spec.parts:
        parts.append({
            "name": p.name,
            "gld": p.gld,
            "part_class": p.part_class,
            "mass": p.mass,
            "design_pose": p.design_pose.to_list(),
            "adjacent": list(p.adjacent),
            "joints": [{"part": o, "kind": k} for o, k in p.joints],
            "subassembly": p.subassembly,
            "half_extents": list(p.half_extents),
        })
    return {
        "assembly_name": spec.assembly_name,
        "origin_frame": spec.origin_frame.to_list(),
        "parts": parts,
    }


def workcell_to_dict(spec):
    return {
        "robots": [{
            "name": r.name,
            "base_pose": r.base_pose.to_list(),
            "workspace": {"min": list(r.workspace_min), "max": list(r.workspace_max)},
            "retract_pose": r.retract_pose.to_list(),
        } for r in spec.robots],
        "tool_rack": [{
            "slot_pose": s.slot_pose.to_list(),
            "gripper": {
                "name": s.gripper.name,
                "description": s.gripper.description,
                "compatible_classes": list(s.gripper.compatible_classes),
                "grasp_offset": s.gripper.grasp_offset.to_list(),
            },
        } for s in spec.tool_rack],
        "stations": [{
            "name": s.name,
            "pose": s.pose.to_list(),
            "kind": s.kind,
            "half_extents": list(s.half_extents),
        } for s in spec.stations],
        "initial_part_locations": {
            k: spec.initial_part_locations[k].to_list()
            for k in sorted(spec.initial_part_locations)
        },
    }


def dump_json(spec):
    if isinstance(spec, AssemblySpec):
        data = assembly_to_dict(spec)
    else:
        data = workcell_to_dict(spec)
    return json.dumps(data, indent=2)


# -- prompt rendering ---------------------------------------------------------------

def _num(v):
    v = round(float(v), 6)
    if v == 0:
        v = 0.0  # drop negative zero
    return f"{v:.6g}"


def format_pose(pose):
    xyz = ", ".join(_num(v) for v in pose.translation)
    rpy = ", ".join(_num(v) for v in to_rpy(pose))
    return f"xyz=[{xyz}] rpy=[{rpy}]"


def render_context(spec, naming="both", assembly=None):
    """Render a spec as a stable, prompt-ready text dictionary.

    ``naming`` selects how parts are labelled: ``"both"`` shows the CAD
    name and its GLD, ``"gld"`` only the GLD, ``"dld"`` only the CAD name.
    Workcell part locations are relabelled only when ``assembly`` is given.
    """
    if naming not in ("both", "gld", "dld"):
        raise ValueError(f"unknown naming mode {naming!r}")
    if isinstance(spec, AssemblySpec):
        return _render_assembly(spec, naming)
    if isinstance(spec, WorkcellSpec):
        return _render_workcell(spec, naming, assembly)
    raise TypeError(f"cannot render {type(spec).__name__}")


def _render_assembly(spec, naming):
    label = {p.name: (p.label if naming == "gld" else p.name) for p in spec.parts}
    lines = [
        f"assembly: {spec.assembly_name}",
        f"origin_frame: {format_pose(spec.origin_frame)}",
        f"part_count: {len(spec.parts)}",
    ]
    for p in spec.parts:
        lines.append("")
        lines.append(f"part: {label[p.name]}")
        if naming == "both":
            lines.append(f"  gld: {p.label}")
        lines.append(f"  class: {p.part_class}")
        lines.append(f"  mass_kg: {_num(p.mass)}")
        lines.append(f"  design_pose: {format_pose(p.design_pose)}")
        lines.append(f"  adjacent: [{', '.join(label[a] for a in p.adjacent)}]")
        if p.joints:
            js = ", ".join(f"{label[o]} ({k})" for o, k in p.joints)
            lines.append(f"  joints: [{js}]")
        if p.subassembly:
            lines.append(f"  subassembly: {p.subassembly}")
    return "\n".join(lines) + "\n"


def _render_workcell(spec, naming, assembly):
    def label(name):
        if assembly is None or naming == "dld" or name not in assembly.names():
            return name
        gld = assembly.part(name).label
        if naming == "gld":
            return gld
        return name if gld == name else f"{name} ({gld})"

    lines = ["workcell:", "robots:"]
    for r in spec.robots:
        lo = ", ".join(_num(v) for v in r.workspace_min)
        hi = ", ".join(_num(v) for v in r.workspace_max)
        lines.append(f"- name: {r.name}")
        lines.append(f"  base_pose: {format_pose(r.base_pose)}")
        lines.append(f"  workspace: min=[{lo}] max=[{hi}]")
        lines.append(f"  retract_pose: {format_pose(r.retract_pose)}")
    lines.append("grippers:")
    for slot in spec.tool_rack:
        g = slot.gripper
        lines.append(f"- name: {g.name}")
        lines.append(f"  description: {g.description}")
        lines.append(f"  handles: [{', '.join(g.compatible_classes)}]")
        lines.append(f"  rack_slot: {format_pose(slot.slot_pose)}")
    lines.append("stations:")
    for s in spec.stations:
        lines.append(f"- name: {s.name}")
        lines.append(f"  kind: {s.kind}")
        lines.append(f"  pose: {format_pose(s.pose)}")
    lines.append("initial_part_locations:")
    for key in sorted(spec.initial_part_locations):
        lines.append(f"  {label(key)}: {format_pose(spec.initial_part_locations[key])}")
    return "\n".join(lines) + "\n"
