"""Exception hierarchy shared across the pipeline."""


class AsmGenError(Exception):
    """Base class for every error raised by this package."""


# -- assembly / workcell ingestion -------------------------------------------

class SchemaError(AsmGenError, ValueError):
    """A document field is missing, ill-typed or violates an invariant.

    ``path`` is the JSON path of the offending value, e.g. ``parts[2].mass``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class AssemblyReferenceError(SchemaError):
    """A part name referenced in the document does not resolve."""


class UnknownPart(AsmGenError, KeyError):
    def __init__(self, name, message=None):
        self.name = name
        super().__init__(message or f"unknown part {name!r}")

    def __str__(self):
        return self.args[0]


# -- chat history --------------------------------------------------------------

class HistoryError(AsmGenError):
    pass


class AlreadyBootstrapped(HistoryError):
    pass


class NotBootstrapped(HistoryError):
    pass


# -- providers -----------------------------------------------------------------

class ProviderError(AsmGenError):
    pass


class AuthError(ProviderError):
    pass


class TransportError(ProviderError):
    pass


class TranscriptExhausted(ProviderError):
    pass


class TranscriptMismatch(ProviderError):
    def __init__(self, missing, index):
        self.missing = missing
        self.index = index
        super().__init__(
            f"transcript entry {index}: expected prompt to contain {missing!r}")


# -- planning ------------------------------------------------------------------

class PlanError(AsmGenError):
    pass


class PlanParseError(PlanError):
    def __init__(self, message, location="", raw=""):
        self.location = location
        self.raw = raw
        super().__init__(f"{message} at {location}" if location else message)


class UnknownBehavior(PlanError):
    pass


class PlanExhausted(PlanError):
    pass


# -- script agent / orchestrator -------------------------------------------------

class MissingExample(AsmGenError):
    pass


class EmptyBlock(AsmGenError):
    pass


class IoError(AsmGenError, OSError):
    pass


class AttemptsExhausted(AsmGenError):
    def __init__(self, subtask, attempts):
        self.subtask = subtask
        self.attempts = list(attempts)
        last = self.attempts[-1].error if self.attempts else ""
        super().__init__(
            f"subtask {subtask.ordinal} ({subtask.description!r}) failed "
            f"{len(self.attempts)} attempt(s); last error: {last}")


class AbortedRun(AsmGenError):
    def __init__(self, cause, report):
        self.cause = cause
        self.report = report
        super().__init__(f"pipeline aborted: {cause}")


class ConfigError(AsmGenError):
    """Bad run configuration or unreadable input files."""
