import json

import pytest
import requests

from asmgen.errors import AuthError, TranscriptExhausted, TranscriptMismatch, TransportError
from asmgen.llm import (CompletionRequest, HttpProvider, ProviderConfig,
                        RecordProvider, ReplayProvider, TranscriptEntry,
                        load_transcript, make_provider)

TASK = "Assemble the Skateboard Truck"


def req(text, temperature=None):
    return CompletionRequest("m", [("system", "role"), ("user", text)], temperature)


def test_replay_returns_response():
    p = ReplayProvider([TranscriptEntry((TASK,), "1. ...")])
    assert p.complete(req(f"Task: {TASK}")) == "1. ..."


def test_replay_mismatch_names_substring():
    p = ReplayProvider([TranscriptEntry((TASK,), "1. ...")])
    with pytest.raises(TranscriptMismatch) as err:
        p.complete(req("Task: something else"))
    assert err.value.missing == TASK


def test_replay_exhausted():
    p = ReplayProvider([TranscriptEntry((), "only")])
    p.complete(req("x"))
    with pytest.raises(TranscriptExhausted):
        p.complete(req("x"))


def test_transcript_validation(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps([{"expect_contains": "oops", "response": "r"}]))
    with pytest.raises(ValueError):
        load_transcript(path)
    with pytest.raises(ValueError):
        TranscriptEntry((), "")


@pytest.mark.parametrize("selector, kind", [
    ("http:", "http"), ("http:http://localhost:8000/v1", "http"),
    ("replay:tx.json", "replay"), ("record:out.json", "record"),
])
def test_selector(selector, kind):
    assert ProviderConfig.parse(selector).kind == kind


@pytest.mark.parametrize("selector", ["grpc:x", "replay", "replay:", "nonsense"])
def test_bad_selector(selector):
    with pytest.raises(ValueError):
        ProviderConfig.parse(selector)


class FakeResponse:
    def __init__(self, status, payload=None):
        self.status_code = status
        self._payload = payload
        self.text = json.dumps(payload)

    def json(self):
        if self._payload is None:
            raise ValueError("no body")
        return self._payload


class FakeSession:
    def __init__(self, *outcomes):
        self.outcomes = list(outcomes)
        self.posts = []

    def post(self, url, json=None, timeout=None, headers=None):
        self.posts.append((url, json, headers))
        out = self.outcomes.pop(0)
        if isinstance(out, Exception):
            raise out
        return out


def ok(text):
    return FakeResponse(200, {"choices": [{"message": {"role": "assistant", "content": text}}]})


@pytest.fixture
def key(monkeypatch):
    monkeypatch.setenv("ASM_LLM_API_KEY", "sk-test")


def http(session, **kw):
    cfg = ProviderConfig(kind="http", endpoint="http://llm.local/v1/", **kw)
    sleeps = []
    return HttpProvider(cfg, session=session, sleep=sleeps.append), sleeps


def test_http_wire_format(key):
    s = FakeSession(ok("hello"))
    p, _ = http(s)
    assert p.complete(req("hi")) == "hello"
    url, body, headers = s.posts[0]
    assert url == "http://llm.local/v1/chat/completions"
    assert body == {"model": "m", "messages": [
        {"role": "system", "content": "role"}, {"role": "user", "content": "hi"}]}
    assert "temperature" not in body
    assert headers["Authorization"] == "Bearer sk-test"


def test_http_temperature_sent_when_set(key):
    s = FakeSession(ok("x"))
    p, _ = http(s)
    p.complete(req("hi", temperature=0.2))
    assert s.posts[0][1]["temperature"] == 0.2


def test_http_retries_then_succeeds(key):
    s = FakeSession(FakeResponse(429), requests.ConnectionError("reset"), ok("fine"))
    p, sleeps = http(s, backoff=0.5)
    assert p.complete(req("hi")) == "fine"
    assert sleeps == [0.5, 1.0]


def test_http_gives_up(key):
    s = FakeSession(FakeResponse(500), FakeResponse(502), FakeResponse(503))
    p, _ = http(s)
    with pytest.raises(TransportError, match="3 attempts"):
        p.complete(req("hi"))


def test_http_auth_errors(key, monkeypatch):
    p, _ = http(FakeSession(FakeResponse(401)))
    with pytest.raises(AuthError):
        p.complete(req("hi"))
    monkeypatch.delenv("ASM_LLM_API_KEY")
    p, _ = http(FakeSession())
    with pytest.raises(AuthError, match="ASM_LLM_API_KEY"):
        p.complete(req("hi"))


def test_http_malformed_body(key):
    p, _ = http(FakeSession(FakeResponse(200, {"choices": []})))
    with pytest.raises(TransportError, match="malformed"):
        p.complete(req("hi"))


def test_api_key_never_logged(key, caplog):
    caplog.set_level("DEBUG", logger="asmgen")
    p, _ = http(FakeSession(ok("x")))
    p.complete(req("hi"))
    assert "sk-test" not in caplog.text


def test_record_then_replay(key, tmp_path):
    path = tmp_path / "rec.json"
    cfg = ProviderConfig(kind="record", transcript=str(path))
    inner, _ = http(FakeSession(ok("plan A"), ok("script B")))
    rec = RecordProvider(cfg, inner=inner)
    requests_seen = [req(f"Task: {TASK}"), req("Subtask: Pick the baseplate")]
    outs = [rec.complete(r) for r in requests_seen]
    replay = make_provider(ProviderConfig(kind="replay", transcript=str(path)))
    assert [replay.complete(r) for r in requests_seen] == outs
    assert replay.remaining() == 0
