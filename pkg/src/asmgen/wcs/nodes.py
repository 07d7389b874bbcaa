"""AST node types.  Spans are excluded from equality so two trees compare
structurally."""
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int
    column: int


def _span():
    return field(default=Span(1, 1), compare=False, repr=False)


# -- expressions ------------------------------------------------------------------

@dataclass
class Name:
    id: str
    span: Span = _span()


@dataclass
class Number:
    value: float
    span: Span = _span()


@dataclass
class String:
    value: str
    span: Span = _span()


@dataclass
class Const:
    value: object  # True, False or None
    span: Span = _span()


@dataclass
class ListLit:
    items: list
    span: Span = _span()


@dataclass
class Attribute:
    obj: object
    attr: str
    span: Span = _span()


@dataclass
class Call:
    func: object
    args: list
    span: Span = _span()


@dataclass
class Index:
    obj: object
    index: object
    span: Span = _span()


@dataclass
class BinOp:
    op: str  # + - * / @
    left: object
    right: object
    span: Span = _span()


@dataclass
class Compare:
    op: str  # == != < <= > >=
    left: object
    right: object
    span: Span = _span()


@dataclass
class BoolOp:
    op: str  # and / or
    left: object
    right: object
    span: Span = _span()


@dataclass
class UnaryOp:
    op: str  # - / not
    operand: object
    span: Span = _span()


# -- statements ---------------------------------------------------------------------
# ``comment`` holds a trailing ``# ...`` on the statement's (header) line.

@dataclass
class Comment:
    text: str
    doc: bool = False  # triple-quoted docstring rather than '#'
    span: Span = _span()


@dataclass
class Let:
    name: str
    value: object
    comment: str | None = None
    span: Span = _span()


@dataclass
class Assign:
    name: str
    value: object
    comment: str | None = None
    span: Span = _span()


@dataclass
class ExprCall:
    call: Call
    comment: str | None = None
    span: Span = _span()


@dataclass
class Print:
    args: list
    comment: str | None = None
    span: Span = _span()


@dataclass
class Pass:
    comment: str | None = None
    span: Span = _span()


@dataclass
class Return:
    value: object = None
    comment: str | None = None
    span: Span = _span()


@dataclass
class Raise:
    exc: object = None  # a Call such as Exception("..."), or None to re-raise
    comment: str | None = None
    span: Span = _span()


@dataclass
class If:
    branches: list  # [(condition, body)], first is the 'if', rest 'elif'
    orelse: list | None = None
    comments: list = field(default_factory=list)  # header comments, per clause
    span: Span = _span()


@dataclass
class For:
    var: str
    iterable: object
    body: list
    comment: str | None = None
    span: Span = _span()


@dataclass
class Handler:
    exc_name: str | None
    alias: str | None
    body: list
    comment: str | None = None
    span: Span = _span()


@dataclass
class TryExcept:
    body: list
    handlers: list
    comment: str | None = None
    span: Span = _span()


# -- top level --------------------------------------------------------------------

@dataclass
class Import:
    text: str  # normalised "import a.b" / "from a import b, c"
    comment: str | None = None
    span: Span = _span()


@dataclass
class FunctionDef:
    name: str
    params: list
    body: list
    comment: str | None = None
    span: Span = _span()


@dataclass
class Script:
    items: list  # Import | FunctionDef | Comment, in source order
    source: str = field(default="", compare=False, repr=False)

    @property
    def functions(self):
        return [i for i in self.items if isinstance(i, FunctionDef)]

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None


STATEMENT_TYPES = (Comment, Let, Assign, ExprCall, Print, Pass, Return, Raise, If, For, TryExcept)


def child_blocks(stmt):
    """Yield every nested statement list of a compound statement."""
    if isinstance(stmt, If):
        for _cond, body in stmt.branches:
            yield body
        if stmt.orelse is not None:
            yield stmt.orelse
    elif isinstance(stmt, For):
        yield stmt.body
    elif isinstance(stmt, TryExcept):
        yield stmt.body
        for h in stmt.handlers:
            yield h.body
    elif isinstance(stmt, FunctionDef):
        yield stmt.body


def walk_statements(body):
    for stmt in body:
        yield stmt
        for block in child_blocks(stmt):
            yield from walk_statements(block)


def walk_expr(expr):
    """Yield ``expr`` and every sub-expression, pre-order."""
    yield expr
    if isinstance(expr, ListLit):
        for item in expr.items:
            yield from walk_expr(item)
    elif isinstance(expr, Attribute):
        yield from walk_expr(expr.obj)
    elif isinstance(expr, Call):
        yield from walk_expr(expr.func)
        for a in expr.args:
            yield from walk_expr(a)
    elif isinstance(expr, Index):
        yield from walk_expr(expr.obj)
        yield from walk_expr(expr.index)
    elif isinstance(expr, (BinOp, Compare, BoolOp)):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, UnaryOp):
        yield from walk_expr(expr.operand)
