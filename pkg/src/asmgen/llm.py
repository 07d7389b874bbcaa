"""Chat-completion providers.

``HttpProvider`` speaks the OpenAI-compatible ``/chat/completions``
protocol.  ``ReplayProvider`` serves canned responses from a transcript
file so whole pipeline runs are deterministic; ``RecordProvider`` wraps
the HTTP provider and writes such a transcript.
"""
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import AuthError, TranscriptExhausted, TranscriptMismatch, TransportError

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "ASM_LLM_API_KEY"
DEFAULT_ENDPOINT = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4"
RECORD_SNIPPET = 200


@dataclass(frozen=True)
class CompletionRequest:
    model: str
    messages: list  # (role, content) pairs
    temperature: float | None = None

    def prompt_text(self):
        return "\n".join(content for _role, content in self.messages)

    def to_body(self):
        body = {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
        }
        if self.temperature is not None:
            body["temperature"] = self.temperature
        return body


@dataclass(frozen=True)
class TranscriptEntry:
    expect_contains: tuple
    response: str

    def __post_init__(self):
        if not self.response:
            raise ValueError("transcript response must be nonempty")


@dataclass
class ProviderConfig:
    kind: str = "replay"  # http | replay | record
    endpoint: str = DEFAULT_ENDPOINT
    model: str = DEFAULT_MODEL
    api_key_env_var: str = DEFAULT_API_KEY_ENV
    transcript: str | None = None
    temperature: float | None = None
    timeout: float = 120.0
    retries: int = 3
    backoff: float = 1.0

    @classmethod
    def parse(cls, selector, **overrides):
        """Build a config from ``http:[URL]``, ``replay:PATH`` or ``record:PATH``."""
        kind, sep, rest = selector.partition(":")
        if not sep or kind not in ("http", "replay", "record"):
            raise ValueError(
                f"unknown provider {selector!r}; use http:, replay:PATH or record:PATH")
        cfg = cls(kind=kind, **overrides)
        if kind == "http":
            if rest:
                cfg.endpoint = rest
        else:
            if not rest:
                raise ValueError(f"{kind}: provider needs a transcript path")
            cfg.transcript = rest
        return cfg


def load_transcript(path):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError(f"{path}: transcript must be a JSON array")
    entries = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or not isinstance(item.get("response"), str):
            raise ValueError(f"{path}[{i}]: entry needs a string 'response'")
        expect = item.get("expect_contains", [])
        if not isinstance(expect, list) or not all(isinstance(s, str) for s in expect):
            raise ValueError(f"{path}[{i}].expect_contains must be a list of strings")
        entries.append(TranscriptEntry(tuple(expect), item["response"]))
    return entries


def dump_transcript(entries):
    return json.dumps(
        [{"expect_contains": list(e.expect_contains), "response": e.response} for e in entries],
        indent=2, ensure_ascii=False)


class ReplayProvider:
    """Pops transcript entries in order, checking each request against them."""

    ordered = True

    def __init__(self, entries):
        self.entries = list(entries)
        self.position = 0
        self.calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path):
        return cls(load_transcript(path))

    def remaining(self):
        return len(self.entries) - self.position

    def complete(self, request):
        with self._lock:
            self.calls += 1
            if self.position >= len(self.entries):
                raise TranscriptExhausted(
                    f"transcript exhausted after {len(self.entries)} entries")
            index = self.position
            entry = self.entries[index]
            self.position += 1
        prompt = request.prompt_text()
        for needle in entry.expect_contains:
            if needle not in prompt:
                raise TranscriptMismatch(needle, index)
        log.debug("replay[%d] -> %d chars", index, len(entry.response))
        return entry.response


class HttpProvider:
    """Minimal OpenAI-compatible chat client with retry and backoff."""

    ordered = False

    def __init__(self, config, session=None, sleep=time.sleep):
        self.config = config
        self.session = session or requests.Session()
        self.sleep = sleep
        self.calls = 0

    def _api_key(self):
        key = os.environ.get(self.config.api_key_env_var)
        if not key:
            raise AuthError(
                f"no API key: set the {self.config.api_key_env_var} environment variable")
        return key

    def complete(self, request):
        key = self._api_key()
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        body = request.to_body()
        if self.config.temperature is not None and "temperature" not in body:
            body["temperature"] = self.config.temperature
        log.debug("POST %s %s", url, json.dumps(body)[:4000])
        self.calls += 1
        last = None
        for attempt in range(self.config.retries):
            if attempt:
                self.sleep(self.config.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(
                    url, json=body, timeout=self.config.timeout,
                    headers={"Authorization": f"Bearer {key}"})
            except requests.RequestException as exc:
                last = f"{type(exc).__name__}: {exc}"
                log.warning("transport error (attempt %d): %s", attempt + 1, last)
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"HTTP {resp.status_code} from {url}")
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                log.warning("retryable status (attempt %d): %s", attempt + 1, last)
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                content = resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed completion response: {exc}") from None
            log.debug("response %s", content[:4000])
            return content
        raise TransportError(f"giving up after {self.config.retries} attempts: {last}")


class RecordProvider:
    """Forwards to HTTP and appends every exchange to a transcript file."""

    ordered = True

    def __init__(self, config, inner=None):
        self.inner = inner or HttpProvider(config)
        self.path = Path(config.transcript)
        self.entries = []
        self._lock = threading.Lock()

    @property
    def calls(self):
        return self.inner.calls

    def complete(self, request):
        with self._lock:
            response = self.inner.complete(request)
            last = request.messages[-1][1] if request.messages else ""
            self.entries.append(TranscriptEntry((last[:RECORD_SNIPPET],), response))
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(dump_transcript(self.entries), encoding="utf-8")
            return response


def make_provider(config):
    if config.kind == "replay":
        return ReplayProvider.from_file(config.transcript)
    if config.kind == "record":
        return RecordProvider(config)
    if config.kind == "http":
        return HttpProvider(config)
    raise ValueError(f"unknown provider kind {config.kind!r}")


@dataclass
class CallLog:
    """Counts calls through any provider; used for run reports."""

    provider: object
    count: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def ordered(self):
        return getattr(self.provider, "ordered", True)

    def complete(self, request):
        with self._lock:
            self.count += 1
        return self.provider.complete(request)
