from ..errors import AsmGenError
from .nodes import Span


def source_lines(source):
    return source.split("\n")


def excerpt_at(source, line):
    lines = source_lines(source)
    if 1 <= line <= len(lines):
        return lines[line - 1]
    return ""


def clamp_span(source, line, column):
    """Pull a position back inside the source (EOF errors land on the last line)."""
    lines = source_lines(source)
    if line < 1:
        line, column = 1, 1
    if line > len(lines):
        line = len(lines)
        column = len(lines[-1]) + 1
    column = max(1, min(column, len(lines[line - 1]) + 1))
    return Span(line, column)


def feedback_text(kind, message, span, excerpt):
    """The error text handed back to the script agent."""
    caret = " " * (span.column - 1) + "^"
    return (f"{kind}: {message}\n at line {span.line}, column {span.column}:\n"
            f" {excerpt}\n {caret}")


class ScriptError(AsmGenError):
    """A lexing, parsing or static-check failure with its source location."""

    def __init__(self, kind, message, span, excerpt=""):
        self.kind = kind
        self.message = message
        self.span = span
        self.excerpt = excerpt
        super().__init__(self.feedback())

    @classmethod
    def at(cls, kind, message, source, line, column):
        span = clamp_span(source, line, column)
        return cls(kind, message, span, excerpt_at(source, span.line))

    def feedback(self):
        return feedback_text(self.kind, self.message, self.span, self.excerpt)

    def __eq__(self, other):
        if not isinstance(other, ScriptError):
            return NotImplemented
        return (self.kind, self.message, self.span, self.excerpt) == (
            other.kind, other.message, other.span, other.excerpt)

    def __hash__(self):
        return hash((self.kind, self.message, self.span))

    def __repr__(self):
        return f"ScriptError({self.kind!r}, {self.message!r}, line={self.span.line}, col={self.span.column})"
