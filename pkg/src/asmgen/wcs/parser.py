"""Recursive-descent parser producing a spanned AST."""
from . import nodes as N
from .errors import ScriptError
from .lexer import tokenize

MAX_EXPR_DEPTH = 40
MAX_BLOCK_DEPTH = 40

COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


def decode_source(source):
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            text = data.decode("utf-8", errors="replace")
            prefix = data[:exc.start].decode("utf-8", errors="replace")
            line = prefix.count("\n") + 1
            col = len(prefix) - (prefix.rfind("\n") + 1) + 1
            raise ScriptError.at("Lex", "invalid UTF-8 in source", text, line, col) from None
    return source


class Parser:
    def __init__(self, source):
        self.src = source
        self.tokens = tokenize(source)
        self.i = 0
        self.expr_depth = 0
        self.block_depth = 0

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def at(self, kind, value=None):
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def at_op(self, value):
        return self.at("OP", value)

    def at_kw(self, value):
        return self.at("KW", value)

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ScriptError.at("Parse", message, self.src, tok.line, tok.column)

    def expect(self, kind, value=None, what=None):
        if not self.at(kind, value):
            want = what or (repr(value) if value is not None else kind.lower())
            raise self.error(f"expected {want}, found {self.tok.describe()}")
        return self.next()

    def expect_name(self, what="a name"):
        if not self.at("NAME"):
            if self.at("KW"):
                raise self.error(f"expected {what}, found keyword {self.tok.value!r}")
            raise self.error(f"expected {what}, found {self.tok.describe()}")
        return self.next()

    @staticmethod
    def span(tok):
        return N.Span(tok.line, tok.column)

    # -- top level ----------------------------------------------------------------

    def parse_script(self):
        items = []
        while not self.at("EOF"):
            if self.at("NEWLINE"):
                self.next()
            elif self.at("COMMENT_LINE"):
                t = self.next()
                items.append(N.Comment(t.value, span=self.span(t)))
            elif self.at("COMMENT"):
                t = self.next()
                items.append(N.Comment(t.value, span=self.span(t)))
            elif self.at_kw("def"):
                items.append(self.funcdef())
            elif self.at_kw("import") or self.at_kw("from"):
                items.append(self.import_stmt())
            elif self.at("STRING") and self.tok.triple:
                t = self.next()
                items.append(N.Comment(t.value, doc=True, span=self.span(t)))
                self.end_simple()
            elif self.at("INDENT"):
                raise self.error("unexpected indent")
            else:
                raise self.error(
                    f"expected a function definition or import, found {self.tok.describe()}")
        return N.Script(items, source=self.src)

    def dotted(self):
        parts = [self.expect_name("a module name").value]
        while self.at_op("."):
            self.next()
            parts.append(self.expect_name("a module name").value)
        return ".".join(parts)

    def import_stmt(self):
        t = self.next()
        if t.value == "import":
            text = f"import {self.dotted()}"
        else:
            module = self.dotted()
            self.expect("KW", "import")
            if self.at_op("*"):
                self.next()
                names = ["*"]
            else:
                names = [self.expect_name().value]
                while self.at_op(","):
                    self.next()
                    names.append(self.expect_name().value)
            text = f"from {module} import {', '.join(names)}"
        comment = self.end_simple()
        return N.Import(text, comment=comment, span=self.span(t))

    def funcdef(self):
        t = self.next()
        name = self.expect_name("a function name").value
        self.expect("OP", "(")
        params = []
        if not self.at_op(")"):
            params.append(self.expect_name("a parameter name").value)
            while self.at_op(","):
                self.next()
                if self.at_op(")"):
                    break
                params.append(self.expect_name("a parameter name").value)
        self.expect("OP", ")")
        self.expect("OP", ":")
        comment, body = self.suite()
        return N.FunctionDef(name, params, body, comment=comment, span=self.span(t))

    # -- blocks ---------------------------------------------------------------------

    def trailing_comment(self):
        if self.at("COMMENT"):
            return self.next().value
        return None

    def end_simple(self):
        comment = self.trailing_comment()
        if self.at("EOF"):
            return comment
        self.expect("NEWLINE", what="end of line")
        return comment

    def suite(self):
        """After a ':' -> (header comment, statements)."""
        self.block_depth += 1
        if self.block_depth > MAX_BLOCK_DEPTH:
            raise self.error("blocks nested too deeply")
        try:
            comment = self.trailing_comment()
            if comment is None and not self.at("NEWLINE"):
                # inline body: ``if x: return``
                return None, [self.simple_stmt()]
            self.expect("NEWLINE", what="end of line")
            if not self.at("INDENT"):
                raise self.error("expected an indented block")
            self.next()
            body = []
            while not self.at("DEDENT") and not self.at("EOF"):
                body.append(self.statement())
            if self.at("DEDENT"):
                self.next()
            if not any(not isinstance(s, N.Comment) for s in body):
                raise self.error("block contains no statements")
            return comment, body
        finally:
            self.block_depth -= 1

    def statement(self):
        t = self.tok
        if t.kind == "COMMENT_LINE":
            self.next()
            return N.Comment(t.value, span=self.span(t))
        if t.kind == "STRING" and t.triple:
            self.next()
            self.end_simple()
            return N.Comment(t.value, doc=True, span=self.span(t))
        if t.kind == "INDENT":
            raise self.error("unexpected indent")
        if t.kind == "KW":
            if t.value == "if":
                return self.if_stmt()
            if t.value == "for":
                return self.for_stmt()
            if t.value == "try":
                return self.try_stmt()
            if t.value == "def":
                raise self.error("nested function definitions are not supported")
            if t.value in ("import", "from"):
                raise self.error("imports are only allowed at the top of the script")
            if t.value in ("else", "elif", "except"):
                raise self.error(f"{t.value!r} without a matching block")
        return self.simple_stmt()

    def simple_stmt(self):
        t = self.tok
        sp = self.span(t)
        if self.at_kw("let"):
            self.next()
            name = self.expect_name("a variable name").value
            self.expect("OP", "=")
            value = self.expression()
            return N.Let(name, value, comment=self.end_simple(), span=sp)
        if self.at_kw("pass"):
            self.next()
            return N.Pass(comment=self.end_simple(), span=sp)
        if self.at_kw("return"):
            self.next()
            value = None
            if not (self.at("NEWLINE") or self.at("COMMENT") or self.at("EOF")):
                value = self.expression()
            return N.Return(value, comment=self.end_simple(), span=sp)
        if self.at_kw("raise"):
            self.next()
            exc = None
            if not (self.at("NEWLINE") or self.at("COMMENT") or self.at("EOF")):
                exc = self.expression()
            return N.Raise(exc, comment=self.end_simple(), span=sp)
        if self.at_kw("print"):
            self.next()
            self.expect("OP", "(")
            args = self.arguments(")")
            return N.Print(args, comment=self.end_simple(), span=sp)
        if t.kind == "KW" and t.value not in ("not", "True", "False", "None"):
            raise self.error(f"unexpected keyword {t.value!r}")
        if t.kind == "NAME" and self.tokens[self.i + 1].kind == "OP" \
                and self.tokens[self.i + 1].value == "=":
            self.next()
            self.next()
            value = self.expression()
            return N.Assign(t.value, value, comment=self.end_simple(), span=sp)
        expr = self.expression()
        if self.at_op("="):
            raise self.error("only plain names can be assigned")
        if not isinstance(expr, N.Call):
            raise self.error("expression statement must be a call", t)
        return N.ExprCall(expr, comment=self.end_simple(), span=sp)

    def if_stmt(self):
        t = self.next()
        cond = self.expression()
        self.expect("OP", ":")
        comment, body = self.suite()
        branches = [(cond, body)]
        comments = [comment]
        orelse = None
        while self.at_kw("elif"):
            self.next()
            cond = self.expression()
            self.expect("OP", ":")
            comment, body = self.suite()
            branches.append((cond, body))
            comments.append(comment)
        if self.at_kw("else"):
            self.next()
            self.expect("OP", ":")
            comment, orelse = self.suite()
            comments.append(comment)
        return N.If(branches, orelse, comments=comments, span=self.span(t))

    def for_stmt(self):
        t = self.next()
        var = self.expect_name("a loop variable").value
        self.expect("KW", "in")
        iterable = self.expression()
        self.expect("OP", ":")
        comment, body = self.suite()
        return N.For(var, iterable, body, comment=comment, span=self.span(t))

    def try_stmt(self):
        t = self.next()
        self.expect("OP", ":")
        comment, body = self.suite()
        handlers = []
        while self.at_kw("except"):
            h = self.next()
            exc_name = alias = None
            if self.at("NAME"):
                exc_name = self.next().value
                if self.at_kw("as"):
                    self.next()
                    alias = self.expect_name("a variable name").value
            self.expect("OP", ":")
            hcomment, hbody = self.suite()
            handlers.append(N.Handler(exc_name, alias, hbody, comment=hcomment, span=self.span(h)))
        if not handlers:
            raise self.error("expected 'except' after 'try' block")
        return N.TryExcept(body, handlers, comment=comment, span=self.span(t))

    # -- expressions -------------------------------------------------------------

    def expression(self):
        self.expr_depth += 1
        if self.expr_depth > MAX_EXPR_DEPTH:
            raise self.error("expression nested too deeply")
        try:
            return self.or_expr()
        finally:
            self.expr_depth -= 1

    def or_expr(self):
        left = self.and_expr()
        while self.at_kw("or"):
            t = self.next()
            left = N.BoolOp("or", left, self.and_expr(), span=self.span(t))
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at_kw("and"):
            t = self.next()
            left = N.BoolOp("and", left, self.not_expr(), span=self.span(t))
        return left

    def not_expr(self):
        if self.at_kw("not"):
            t = self.next()
            self.expr_depth += 1
            if self.expr_depth > MAX_EXPR_DEPTH:
                raise self.error("expression nested too deeply")
            try:
                return N.UnaryOp("not", self.not_expr(), span=self.span(t))
            finally:
                self.expr_depth -= 1
        return self.comparison()

    def comparison(self):
        left = self.additive()
        if self.at("OP") and self.tok.value in COMPARE_OPS:
            t = self.next()
            left = N.Compare(t.value, left, self.additive(), span=self.span(t))
            if self.at("OP") and self.tok.value in COMPARE_OPS:
                raise self.error("chained comparisons are not supported")
        return left

    def additive(self):
        left = self.multiplicative()
        while self.at("OP") and self.tok.value in ("+", "-"):
            t = self.next()
            left = N.BinOp(t.value, left, self.multiplicative(), span=self.span(t))
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at("OP") and self.tok.value in ("*", "/", "@"):
            t = self.next()
            left = N.BinOp(t.value, left, self.unary(), span=self.span(t))
        return left

    def unary(self):
        if self.at_op("-"):
            t = self.next()
            self.expr_depth += 1
            if self.expr_depth > MAX_EXPR_DEPTH:
                raise self.error("expression nested too deeply")
            try:
                return N.UnaryOp("-", self.unary(), span=self.span(t))
            finally:
                self.expr_depth -= 1
        return self.postfix()

    def postfix(self):
        expr = self.atom()
        while True:
            if self.at_op("("):
                t = self.next()
                expr = N.Call(expr, self.arguments(")"), span=_start(expr, t))
            elif self.at_op("."):
                self.next()
                name = self.expect_name("an attribute name").value
                expr = N.Attribute(expr, name, span=_start(expr, None))
            elif self.at_op("["):
                t = self.next()
                index = self.expression()
                self.expect("OP", "]")
                expr = N.Index(expr, index, span=_start(expr, t))
            else:
                return expr

    def arguments(self, closer):
        args = []
        while not self.at_op(closer):
            args.append(self.expression())
            if self.at_op(","):
                self.next()
            elif not self.at_op(closer):
                raise self.error(f"expected ',' or {closer!r}, found {self.tok.describe()}")
        self.next()
        return args

    def atom(self):
        t = self.tok
        sp = self.span(t)
        if t.kind == "NUMBER":
            self.next()
            return N.Number(t.value, span=sp)
        if t.kind == "STRING":
            self.next()
            return N.String(t.value, span=sp)
        if t.kind == "NAME":
            self.next()
            return N.Name(t.value, span=sp)
        if t.kind == "KW" and t.value in ("True", "False", "None"):
            self.next()
            return N.Const({"True": True, "False": False, "None": None}[t.value], span=sp)
        if self.at_op("("):
            self.next()
            expr = self.expression()
            self.expect("OP", ")")
            return expr
        if self.at_op("["):
            self.next()
            return N.ListLit(self.arguments("]"), span=sp)
        raise self.error(f"expected an expression, found {t.describe()}")


def _start(expr, tok):
    return getattr(expr, "span", None) or N.Span(tok.line, tok.column)


def parse(source):
    """Parse WCS source (str or UTF-8 bytes) into a :class:`Script`.

    Raises :class:`ScriptError` with kind ``Lex`` or ``Parse``.
    """
    source = decode_source(source)
    return Parser(source).parse_script()
