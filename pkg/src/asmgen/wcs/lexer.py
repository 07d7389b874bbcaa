"""Tokenizer with Python-style INDENT/DEDENT handling.

Standalone comment lines become ``COMMENT_LINE`` tokens and never affect
indentation.  Newlines inside brackets are ignored, as are comments there.
"""
import math
from dataclasses import dataclass

from .errors import ScriptError

KEYWORDS = frozenset({
    "def", "let", "if", "elif", "else", "for", "in", "try", "except", "as",
    "raise", "return", "print", "pass", "import", "from", "and", "or", "not",
    "True", "False", "None",
})
CONTINUATION_KEYWORDS = ("else", "elif", "except")
TWO_CHAR_OPS = ("==", "!=", "<=", ">=")
ONE_CHAR_OPS = "+-*/@<>=()[],:."
TAB_WIDTH = 4
MAX_BRACKET_DEPTH = 40
MAX_INDENT_DEPTH = 40

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "0": "\0"}


@dataclass
class Token:
    kind: str  # NAME KW NUMBER STRING OP NEWLINE INDENT DEDENT COMMENT COMMENT_LINE EOF
    value: object
    line: int
    column: int
    triple: bool = False

    def describe(self):
        if self.kind in ("NAME", "KW", "OP"):
            return repr(self.value)
        if self.kind == "NUMBER":
            return "number"
        if self.kind == "STRING":
            return "string"
        return {"NEWLINE": "end of line", "INDENT": "indent", "DEDENT": "dedent",
                "EOF": "end of input", "COMMENT": "comment",
                "COMMENT_LINE": "comment"}[self.kind]


class Lexer:
    def __init__(self, source):
        self.src = source
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens = []
        self.indents = [0]
        self.depth = 0
        self.pending = []  # standalone comments awaiting indentation decisions

    def error(self, message, line=None, column=None):
        return ScriptError.at("Lex", message, self.src,
                              self.line if line is None else line,
                              self.col if column is None else column)

    def peek(self, k=0):
        i = self.pos + k
        return self.src[i] if i < len(self.src) else ""

    def advance(self, n=1):
        for _ in range(n):
            ch = self.src[self.pos]
            self.pos += 1
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1

    def emit(self, kind, value, line, col, triple=False):
        self.tokens.append(Token(kind, value, line, col, triple))

    # -- driver -----------------------------------------------------------

    def tokenize(self):
        at_line_start = True
        line_has_tokens = False
        while self.pos < len(self.src):
            if at_line_start and self.depth == 0:
                at_line_start = False
                if self._line_start():
                    at_line_start = True
                    continue
                line_has_tokens = True
            ch = self.peek()
            if ch == "\n":
                if self.depth == 0:
                    if line_has_tokens:
                        self.emit("NEWLINE", None, self.line, self.col)
                    line_has_tokens = False
                    at_line_start = True
                self.advance()
            elif ch in " \t\r\f":
                self.advance()
            elif ch == "#":
                line, col = self.line, self.col
                text = self._read_comment()
                if self.depth == 0:
                    self.emit("COMMENT", text, line, col)
            elif ch.isdigit() or (ch == "." and self.peek(1).isdigit()):
                self._number()
            elif ch.isalpha() or ch == "_":
                self._name()
            elif ch == '"':
                self._string()
            elif ch == "'":
                raise self.error("strings must use double quotes")
            else:
                self._op()
        if line_has_tokens:
            self.emit("NEWLINE", None, self.line, self.col)
        self._flush_indent(0, None)
        self.emit("EOF", None, self.line, self.col)
        return self.tokens

    def _line_start(self):
        """Handle indentation.  Returns True when the line was blank or a
        standalone comment (already consumed through its newline)."""
        width = 0
        while self.peek() in (" ", "\t", "\f", "\r") and self.peek():
            ch = self.peek()
            if ch == " ":
                width += 1
            elif ch == "\t":
                width += TAB_WIDTH - width % TAB_WIDTH
            self.advance()
        ch = self.peek()
        if ch == "" or ch == "\n":
            if ch:
                self.advance()
            return True
        if ch == "#":
            line, col = self.line, self.col
            text = self._read_comment()
            self.pending.append((width, text, line, col))
            if self.peek() == "\n":
                self.advance()
            return True
        first_word = self._peek_word()
        self._flush_indent(width, first_word)
        return False

    def _peek_word(self):
        end = self.pos
        while end < len(self.src) and (self.src[end].isalnum() or self.src[end] == "_"):
            end += 1
        return self.src[self.pos:end]

    def _flush_indent(self, width, first_word):
        top = self.indents[-1]
        pending, self.pending = self.pending, []
        if width > top:
            if len(self.indents) > MAX_INDENT_DEPTH:
                raise self.error("blocks nested too deeply")
            self.emit("INDENT", width, self.line, self.col)
            self.indents.append(width)
            self._emit_comments(pending)
            return
        if width == top:
            self._emit_comments(pending)
            return
        # dedent: comments indented deeper than the new line stay in the inner block
        if first_word in CONTINUATION_KEYWORDS:
            split = len(pending)
        else:
            split = next((i for i, c in enumerate(pending) if c[0] <= width), len(pending))
        self._emit_comments(pending[:split])
        while self.indents[-1] > width:
            self.indents.pop()
            self.emit("DEDENT", width, self.line, self.col)
        if self.indents[-1] != width:
            raise self.error("unindent does not match any outer indentation level")
        self._emit_comments(pending[split:])

    def _emit_comments(self, items):
        for _width, text, line, col in items:
            self.emit("COMMENT_LINE", text, line, col)

    # -- token readers ------------------------------------------------------

    def _read_comment(self):
        start = self.pos + 1
        while self.pos < len(self.src) and self.src[self.pos] != "\n":
            self.advance()
        return self.src[start:self.pos].rstrip()

    def _number(self):
        line, col = self.line, self.col
        start = self.pos
        while self.peek().isdigit():
            self.advance()
        if self.peek() == ".":
            self.advance()
            while self.peek().isdigit():
                self.advance()
        if self.peek() in ("e", "E"):
            k = 1
            if self.peek(1) in ("+", "-"):
                k = 2
            if self.peek(k).isdigit():
                self.advance(k)
                while self.peek().isdigit():
                    self.advance()
        text = self.src[start:self.pos]
        try:
            value = float(text)
        except ValueError:
            raise self.error(f"malformed number {text!r}", line, col) from None
        if not math.isfinite(value):
            raise self.error(f"number out of range {text!r}", line, col)
        self.emit("NUMBER", value, line, col)

    def _name(self):
        line, col = self.line, self.col
        start = self.pos
        while self.peek() and (self.peek().isalnum() or self.peek() == "_"):
            self.advance()
        word = self.src[start:self.pos]
        self.emit("KW" if word in KEYWORDS else "NAME", word, line, col)

    def _string(self):
        line, col = self.line, self.col
        if self.src.startswith('"""', self.pos):
            self.advance(3)
            end = self.src.find('"""', self.pos)
            if end < 0:
                raise self.error("unterminated triple-quoted string", line, col)
            text = self.src[self.pos:end]
            self.advance(end - self.pos + 3)
            self.emit("STRING", text, line, col, triple=True)
            return
        self.advance()
        out = []
        while True:
            ch = self.peek()
            if ch == "" or ch == "\n":
                raise self.error("unterminated string", line, col)
            if ch == '"':
                self.advance()
                break
            if ch == "\\":
                esc = self.peek(1)
                if esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                    self.advance(2)
                    continue
                if esc == "u":
                    digits = self.src[self.pos + 2:self.pos + 6]
                    if len(digits) == 4 and all(c in "0123456789abcdefABCDEF" for c in digits):
                        out.append(chr(int(digits, 16)))
                        self.advance(6)
                        continue
                raise self.error("invalid escape sequence")
            out.append(ch)
            self.advance()
        self.emit("STRING", "".join(out), line, col)

    def _op(self):
        line, col = self.line, self.col
        two = self.src[self.pos:self.pos + 2]
        if two in TWO_CHAR_OPS:
            self.advance(2)
            self.emit("OP", two, line, col)
            return
        ch = self.peek()
        if ch not in ONE_CHAR_OPS:
            raise self.error(f"unexpected character {ch!r}")
        if ch in "([":
            self.depth += 1
            if self.depth > MAX_BRACKET_DEPTH:
                raise self.error("brackets nested too deeply")
        elif ch in ")]":
            self.depth = max(0, self.depth - 1)
        self.advance()
        self.emit("OP", ch, line, col)


def tokenize(source):
    return Lexer(source).tokenize()
