"""Canonical pretty-printer: 4-space indents, minimal parentheses."""
from . import nodes as N

INDENT = "    "

# binding strength, loosest first
_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6, "@": 6,
         "neg": 7, "postfix": 8, "atom": 9}


def _prec(e):
    if isinstance(e, N.BoolOp):
        return _PREC[e.op]
    if isinstance(e, N.UnaryOp):
        return _PREC["not"] if e.op == "not" else _PREC["neg"]
    if isinstance(e, N.Compare):
        return _PREC["cmp"]
    if isinstance(e, N.BinOp):
        return _PREC[e.op]
    if isinstance(e, (N.Call, N.Attribute, N.Index)):
        return _PREC["postfix"]
    return _PREC["atom"]


def format_number(v):
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def format_string(s):
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F or 0xD800 <= ord(ch) <= 0xDFFF:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def format_expr(e):
    if isinstance(e, N.Number):
        return format_number(e.value)
    if isinstance(e, N.String):
        return format_string(e.value)
    if isinstance(e, N.Name):
        return e.id
    if isinstance(e, N.Const):
        return repr(e.value)
    if isinstance(e, N.ListLit):
        return "[" + ", ".join(format_expr(i) for i in e.items) + "]"
    if isinstance(e, N.Attribute):
        return f"{_postfix_base(e.obj)}.{e.attr}"
    if isinstance(e, N.Call):
        return f"{_postfix_base(e.func)}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, N.Index):
        return f"{_postfix_base(e.obj)}[{format_expr(e.index)}]"
    if isinstance(e, N.UnaryOp):
        inner = _wrap(e.operand, _prec(e.operand) < _prec(e))
        return f"not {inner}" if e.op == "not" else f"-{inner}"
    if isinstance(e, (N.BinOp, N.Compare, N.BoolOp)):
        p = _prec(e)
        left = _wrap(e.left, _prec(e.left) < p or (isinstance(e, N.Compare) and _prec(e.left) <= p))
        right = _wrap(e.right, _prec(e.right) <= p)
        return f"{left} {e.op} {right}"
    raise TypeError(f"cannot format {type(e).__name__}")


def _wrap(e, needed):
    text = format_expr(e)
    return f"({text})" if needed else text


def _postfix_base(e):
    # numbers need parens so "1.x" is not read as a float literal
    return _wrap(e, _prec(e) < _PREC["postfix"] or isinstance(e, N.Number))


def _with_comment(text, comment):
    return f"{text}  #{comment}" if comment is not None else text


def _doc(text, pad):
    return f'{pad}"""{text}"""'


def format_block(body, level):
    lines = []
    for stmt in body:
        lines.extend(format_stmt(stmt, level))
    return lines


def format_stmt(s, level):
    pad = INDENT * level
    if isinstance(s, N.Comment):
        return [_doc(s.text, pad) if s.doc else f"{pad}#{s.text}"]
    if isinstance(s, N.Let):
        return [_with_comment(f"{pad}let {s.name} = {format_expr(s.value)}", s.comment)]
    if isinstance(s, N.Assign):
        return [_with_comment(f"{pad}{s.name} = {format_expr(s.value)}", s.comment)]
    if isinstance(s, N.ExprCall):
        return [_with_comment(f"{pad}{format_expr(s.call)}", s.comment)]
    if isinstance(s, N.Print):
        args = ", ".join(format_expr(a) for a in s.args)
        return [_with_comment(f"{pad}print({args})", s.comment)]
    if isinstance(s, N.Pass):
        return [_with_comment(f"{pad}pass", s.comment)]
    if isinstance(s, N.Return):
        text = f"{pad}return" if s.value is None else f"{pad}return {format_expr(s.value)}"
        return [_with_comment(text, s.comment)]
    if isinstance(s, N.Raise):
        text = f"{pad}raise" if s.exc is None else f"{pad}raise {format_expr(s.exc)}"
        return [_with_comment(text, s.comment)]
    if isinstance(s, N.If):
        lines = []
        comments = list(s.comments) + [None] * (len(s.branches) + 1)
        for i, (cond, body) in enumerate(s.branches):
            kw = "if" if i == 0 else "elif"
            lines.append(_with_comment(f"{pad}{kw} {format_expr(cond)}:", comments[i]))
            lines.extend(format_block(body, level + 1))
        if s.orelse is not None:
            lines.append(_with_comment(f"{pad}else:", comments[len(s.branches)]))
            lines.extend(format_block(s.orelse, level + 1))
        return lines
    if isinstance(s, N.For):
        head = f"{pad}for {s.var} in {format_expr(s.iterable)}:"
        return [_with_comment(head, s.comment)] + format_block(s.body, level + 1)
    if isinstance(s, N.TryExcept):
        lines = [_with_comment(f"{pad}try:", s.comment)] + format_block(s.body, level + 1)
        for h in s.handlers:
            head = "except"
            if h.exc_name:
                head += f" {h.exc_name}"
                if h.alias:
                    head += f" as {h.alias}"
            lines.append(_with_comment(f"{pad}{head}:", h.comment))
            lines.extend(format_block(h.body, level + 1))
        return lines
    raise TypeError(f"cannot format {type(s).__name__}")


def format_script(script):
    """Render ``script`` canonically.  ``parse(format_script(s))`` equals ``s``."""
    lines = []
    prev = None
    for item in script.items:
        if lines and (isinstance(prev, N.Import) != isinstance(item, N.Import)
                      or (isinstance(prev, N.FunctionDef) and not isinstance(item, N.Import))):
            lines.append("")
        if isinstance(item, N.FunctionDef):
            params = ", ".join(item.params)
            lines.append(_with_comment(f"def {item.name}({params}):", item.comment))
            lines.extend(format_block(item.body, 1))
        elif isinstance(item, N.Import):
            lines.append(_with_comment(item.text, item.comment))
        elif isinstance(item, N.Comment):
            lines.append(_doc(item.text, "") if item.doc else f"#{item.text}")
        prev = item
    return "\n".join(lines) + "\n"
