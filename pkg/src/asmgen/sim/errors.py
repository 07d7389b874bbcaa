from ..errors import AsmGenError
from ..wcs.errors import excerpt_at, feedback_text


class SimError(AsmGenError):
    """A command the simulated workcell refused."""

    kind = "SimError"

    def __init__(self, message):
        self.message = message
        super().__init__(message)


class MotionException(SimError):
    kind = "MotionException"


class CollisionError(SimError):
    kind = "CollisionError"

    def __init__(self, body, other, detail=""):
        self.bodies = (body, other)
        msg = f"collision between {body!r} and {other!r}"
        super().__init__(f"{msg} {detail}".rstrip())


class GripperMismatch(SimError):
    kind = "GripperMismatch"


class GraspFault(SimError):
    kind = "GraspFault"


class StateError(SimError):
    kind = "StateError"


class RuntimeScriptError(AsmGenError):
    """A script aborted while running; carries the faulting statement's span."""

    def __init__(self, kind, message, span, source, cause=None):
        self.kind = kind
        self.message = message
        self.span = span
        self.excerpt = excerpt_at(source, span.line)
        self.cause = cause
        super().__init__(self.feedback())

    def feedback(self):
        return feedback_text(self.kind, self.message, self.span, self.excerpt)
