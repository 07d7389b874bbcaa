"""Static checks run after parsing, before a script may execute."""
import json
from importlib import resources

from . import nodes as N
from .errors import ScriptError, excerpt_at


class ApiCatalog:
    """Script-visible API signatures, shared with the simulator."""

    def __init__(self, data):
        self.data = data
        self.types = data["types"]
        self.builtins = data.get("builtins", {})
        self.errors = tuple(data.get("errors", ("Exception",)))
        self.methods = {}  # name -> set of arities
        self.attributes = set()
        for spec in self.types.values():
            for name, sig in spec.get("methods", {}).items():
                self.methods.setdefault(name, set()).add(len(sig["params"]))
            self.attributes.update(spec.get("attributes", {}))

    @classmethod
    def load(cls, path=None):
        if path is None:
            text = resources.files("asmgen.data").joinpath("api_catalog.json").read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return cls(json.loads(text))

    def has_method(self, type_name, name):
        return name in self.types.get(type_name, {}).get("methods", {})

    def has_attribute(self, type_name, name):
        return name in self.types.get(type_name, {}).get("attributes", {})

    def render_docs(self):
        """Reference documentation text for the script-writing agent."""
        lines = ["WCS API reference", ""]
        for tname, spec in self.types.items():
            lines.append(f"{tname}: {spec.get('doc', '')}")
            for name, sig in spec.get("methods", {}).items():
                lines.append(f"  {tname}.{name}({', '.join(sig['params'])}) -> "
                             f"{sig.get('returns', 'none')}: {sig.get('doc', '')}")
            for name, sig in spec.get("attributes", {}).items():
                lines.append(f"  {tname}.{name} -> {sig.get('returns', '')}: {sig.get('doc', '')}")
            lines.append("")
        lines.append("builtins:")
        for name, sig in self.builtins.items():
            lines.append(f"  {name}: {sig.get('doc', '')}")
        lines.append("  print(values...): write a line to the run log")
        lines.append(f"errors (for raise/except): {', '.join(self.errors)}")
        return "\n".join(lines) + "\n"


_DEFAULT = None


def default_catalog():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = ApiCatalog.load()
    return _DEFAULT


class _Checker:
    def __init__(self, script, api):
        self.script = script
        self.api = api
        self.src = script.source
        self.errors = []
        self.functions = {}
        self.calls = {}  # function -> [(callee, span)]

    def err(self, message, span):
        self.errors.append(ScriptError("Check", message, span, excerpt_at(self.src, span.line)))

    def run(self):
        funcs = self.script.functions
        for f in funcs:
            if f.name in self.functions:
                self.err(f"function {f.name!r} is defined more than once", f.span)
            else:
                self.functions[f.name] = f
        mains = [f for f in funcs if f.name == "main"]
        if not mains:
            self.err("script must define main(workcell)", N.Span(1, 1))
        elif mains[0].params != ["workcell"]:
            self.err("main must take exactly one parameter named 'workcell'", mains[0].span)
        for f in funcs:
            self.check_function(f)
        self.check_recursion()
        self.errors.sort(key=lambda e: (e.span.line, e.span.column))
        return self.errors

    # -- functions and blocks -------------------------------------------------------

    def check_function(self, f):
        if len(set(f.params)) != len(f.params):
            self.err(f"duplicate parameter in {f.name!r}", f.span)
        bound = set(f.params)
        self.current = f.name
        self.calls[f.name] = []
        self.block(f.body, bound, in_handler=False)

    def block(self, body, bound, in_handler):
        returned = False
        for stmt in body:
            if isinstance(stmt, N.Comment):
                continue
            if returned:
                self.err("unreachable statement after return", stmt.span)
                returned = False  # report once per block
            self.statement(stmt, bound, in_handler)
            if isinstance(stmt, N.Return):
                returned = True

    def statement(self, s, bound, in_handler):
        if isinstance(s, N.Let):
            self.expr(s.value, bound)
            bound.add(s.name)
        elif isinstance(s, N.Assign):
            self.expr(s.value, bound)
            if s.name not in bound:
                self.err(f"assignment to undeclared name {s.name!r} (declare it with let)", s.span)
                bound.add(s.name)
        elif isinstance(s, N.ExprCall):
            self.expr(s.call, bound)
        elif isinstance(s, N.Print):
            for a in s.args:
                self.expr(a, bound)
        elif isinstance(s, N.Return):
            if s.value is not None:
                self.expr(s.value, bound)
        elif isinstance(s, N.Raise):
            self.raise_stmt(s, bound, in_handler)
        elif isinstance(s, N.If):
            for cond, body in s.branches:
                self.expr(cond, bound)
                self.block(body, bound, in_handler)
            if s.orelse is not None:
                self.block(s.orelse, bound, in_handler)
        elif isinstance(s, N.For):
            self.expr(s.iterable, bound)
            bound.add(s.var)
            self.block(s.body, bound, in_handler)
        elif isinstance(s, N.TryExcept):
            self.block(s.body, bound, in_handler)
            for h in s.handlers:
                if h.exc_name is not None and h.exc_name not in self.api.errors:
                    self.err(f"unknown exception type {h.exc_name!r}", h.span)
                if h.alias:
                    bound.add(h.alias)
                self.block(h.body, bound, in_handler=True)

    def raise_stmt(self, s, bound, in_handler):
        if s.exc is None:
            if not in_handler:
                self.err("bare 'raise' is only allowed inside an except block", s.span)
            return
        exc = s.exc
        if isinstance(exc, N.Name) and exc.id in bound:
            return
        if (isinstance(exc, N.Call) and isinstance(exc.func, N.Name)
                and exc.func.id in self.api.errors):
            if len(exc.args) > 1:
                self.err(f"{exc.func.id}() takes at most 1 argument", exc.span)
            for a in exc.args:
                self.expr(a, bound)
            return
        self.err("raise needs an exception such as Exception(\"message\")", s.span)

    # -- expressions -------------------------------------------------------------------

    def expr(self, e, bound):
        if isinstance(e, N.Name):
            if e.id in self.api.errors:
                self.err(f"{e.id} can only be used with raise or except", e.span)
            elif (e.id not in bound and e.id not in self.api.builtins
                  and e.id not in self.functions):
                self.err(f"name {e.id!r} is not defined", e.span)
        elif isinstance(e, N.Call):
            self.call(e, bound)
        elif isinstance(e, N.Attribute):
            if e.attr not in self.api.attributes:
                if e.attr in self.api.methods:
                    self.err(f"method {e.attr!r} must be called", e.span)
                else:
                    self.err(f"unknown attribute {e.attr!r}", e.span)
            self.expr(e.obj, bound)
        elif isinstance(e, N.ListLit):
            for item in e.items:
                self.expr(item, bound)
        elif isinstance(e, N.Index):
            self.expr(e.obj, bound)
            self.expr(e.index, bound)
        elif isinstance(e, (N.BinOp, N.Compare, N.BoolOp)):
            self.expr(e.left, bound)
            self.expr(e.right, bound)
        elif isinstance(e, N.UnaryOp):
            self.expr(e.operand, bound)

    def call(self, e, bound):
        for a in e.args:
            self.expr(a, bound)
        nargs = len(e.args)
        f = e.func
        if isinstance(f, N.Attribute):
            self.expr(f.obj, bound)
            arities = self.api.methods.get(f.attr)
            if arities is None:
                self.err(f"unknown API function {f.attr!r}", e.span)
            elif nargs not in arities:
                want = " or ".join(str(a) for a in sorted(arities))
                self.err(f"{f.attr}() expects {want} argument(s), got {nargs}", e.span)
            return
        if isinstance(f, N.Name):
            name = f.id
            if name in self.api.errors:
                self.err(f"{name} can only be used with raise", e.span)
            elif name in self.functions and name not in bound:
                want = len(self.functions[name].params)
                if nargs != want:
                    self.err(f"{name}() expects {want} argument(s), got {nargs}", e.span)
                self.calls[self.current].append((name, e.span))
            elif name in self.api.builtins and name not in bound:
                sig = self.api.builtins[name]
                lo, hi = sig["min_args"], sig["max_args"]
                if not lo <= nargs <= hi:
                    want = str(lo) if lo == hi else f"{lo} to {hi}"
                    self.err(f"{name}() expects {want} argument(s), got {nargs}", e.span)
            elif name in bound:
                self.err(f"{name!r} is not callable", e.span)
            else:
                self.err(f"unknown function {name!r}", e.span)
            return
        self.expr(f, bound)
        self.err("only functions and API methods can be called", e.span)

    def check_recursion(self):
        # iterative DFS; scripts may define long call chains
        state = {}
        for root in self.calls:
            if root in state:
                continue
            state[root] = "active"
            stack = [(root, iter(self.calls.get(root, ())))]
            while stack:
                name, edges = stack[-1]
                for callee, span in edges:
                    if state.get(callee) == "active":
                        self.err(f"recursive call to {callee!r} is not supported", span)
                    elif callee not in state:
                        state[callee] = "active"
                        stack.append((callee, iter(self.calls.get(callee, ()))))
                        break
                else:
                    state[name] = "done"
                    stack.pop()


def check(script, api=None):
    """Return the list of static errors in ``script`` (empty when valid)."""
    return _Checker(script, api or default_catalog()).run()
