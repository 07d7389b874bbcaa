"""Chat history with grouped entries, alias redaction and the base agent."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AlreadyBootstrapped, HistoryError, NotBootstrapped

log = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")
SYSTEM_GUIDELINES = "system_guidelines"
TASK_CONTEXT = "task_context"
RUNTIME = "runtime"
GROUPS = (SYSTEM_GUIDELINES, TASK_CONTEXT, RUNTIME)


@dataclass(frozen=True)
class ChatEntry:
    role: str
    group: str
    content: str
    seq: int


@dataclass
class ChatHistory:
    """Append-only record of one agent's exchanges.

    Guidelines and context are added once by :func:`bootstrap`; after that
    only run-time entries may be appended.
    """

    entries: list = field(default_factory=list)
    bootstrapped: bool = False

    def _append(self, role, group, content):
        if role not in ROLES:
            raise HistoryError(f"unknown role {role!r}")
        if group not in GROUPS:
            raise HistoryError(f"unknown group {group!r}")
        seq = self.entries[-1].seq + 1 if self.entries else 0
        entry = ChatEntry(role, group, content, seq)
        self.entries.append(entry)
        return entry

    def __len__(self):
        return len(self.entries)

    def groups(self):
        return [e.group for e in self.entries]

    def runtime(self):
        return [e for e in self.entries if e.group == RUNTIME]


def _as_entry(item, default_role):
    if isinstance(item, str):
        return default_role, item
    role, content = item
    return role, content


def bootstrap(history, guideline_entries, context_entries):
    """Seed an empty history with guidelines followed by task context.

    Entries are plain strings (guidelines default to the ``system`` role,
    context to ``user``) or ``(role, content)`` pairs.
    """
    if history.bootstrapped:
        raise AlreadyBootstrapped("history already bootstrapped")
    if history.entries:
        raise HistoryError("bootstrap requires an empty history")
    for item in guideline_entries:
        role, content = _as_entry(item, "system")
        history._append(role, SYSTEM_GUIDELINES, content)
    for item in context_entries:
        role, content = _as_entry(item, "user")
        history._append(role, TASK_CONTEXT, content)
    history.bootstrapped = True
    return history


def append_runtime(history, role, content):
    if not history.bootstrapped:
        raise NotBootstrapped("append_runtime on a history that was never bootstrapped")
    history._append(role, RUNTIME, content)
    return history


# -- aliasing --------------------------------------------------------------------

class AliasTable:
    """Bijective map from private terms to public aliases.

    Replacement is plain-substring, longest match first, in a single
    left-to-right pass, so CAD names full of hyphens and digits work.
    """

    def __init__(self, pairs=None):
        pairs = dict(pairs or {})
        for private, alias in pairs.items():
            if not isinstance(private, str) or not isinstance(alias, str):
                raise ValueError("alias terms must be strings")
            if not private or not alias:
                raise ValueError("alias terms must be nonempty")
        aliases = list(pairs.values())
        if len(set(aliases)) != len(aliases):
            raise ValueError("aliases must be pairwise distinct")
        clash = set(aliases) & set(pairs)
        if clash:
            raise ValueError(f"alias equals a private term: {sorted(clash)}")
        self.pairs = pairs
        self._inverse = {v: k for k, v in pairs.items()}

    @classmethod
    def load(cls, path):
        """Read an ``aliases.json`` sidecar; a missing file means no aliasing."""
        path = Path(path) if path else None
        if path is None or not path.exists():
            return cls()
        data = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(data, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in data.items()):
            raise ValueError(f"{path}: expected a flat object of strings")
        return cls(data)

    @classmethod
    def from_gld(cls, assembly):
        """Alias every CAD part name to its GLD (parts whose GLD differs)."""
        return cls({p.name: p.gld for p in assembly.parts if p.gld and p.gld != p.name})

    def __bool__(self):
        return bool(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _replace_longest(text, mapping):
    if not mapping or not text:
        return text
    keys = sorted(mapping, key=len, reverse=True)
    first_chars = {k[0] for k in keys}
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] in first_chars:
            for k in keys:
                if text.startswith(k, i):
                    out.append(mapping[k])
                    i += len(k)
                    break
            else:
                out.append(text[i])
                i += 1
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def redact(text, table):
    return _replace_longest(text, table.pairs) if table else text


def restore(text, table):
    return _replace_longest(text, table._inverse) if table else text


def render_messages(history, table=None):
    """Ordered ``(role, text)`` pairs with private terms redacted."""
    if not history.bootstrapped:
        raise NotBootstrapped("render_messages on a history that was never bootstrapped")
    table = table or AliasTable()
    return [(e.role, redact(e.content, table))
            for e in sorted(history.entries, key=lambda e: e.seq)]


class Agent:
    """Owns a chat history and talks to a completion provider.

    Subclasses fill the history via :func:`bootstrap` and call
    :meth:`ask` for each run-time exchange.
    """

    def __init__(self, provider, aliases=None, model="gpt-4", temperature=None):
        self.provider = provider
        self.aliases = aliases or AliasTable()
        self.model = model
        self.temperature = temperature
        self.history = ChatHistory()
        self.calls = 0

    def ask(self, prompt):
        """Append ``prompt``, query the provider, append and return the reply."""
        from .llm import CompletionRequest

        append_runtime(self.history, "user", prompt)
        request = CompletionRequest(
            model=self.model,
            messages=render_messages(self.history, self.aliases),
            temperature=self.temperature,
        )
        self.calls += 1
        reply = restore(self.provider.complete(request), self.aliases)
        append_runtime(self.history, "assistant", reply)
        return reply
