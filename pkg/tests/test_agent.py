import json
import random

import pytest
from hypothesis import given, strategies as st
from hypothesis.stateful import RuleBasedStateMachine, invariant, rule

from asmgen.agent import (RUNTIME, SYSTEM_GUIDELINES, TASK_CONTEXT, Agent,
                          AliasTable, ChatHistory, append_runtime, bootstrap,
                          redact, render_messages, restore)
from asmgen.errors import AlreadyBootstrapped, NotBootstrapped
from asmgen.llm import ReplayProvider, TranscriptEntry

from oracles import longest_first_replace


def test_bootstrap_orders_groups():
    h = bootstrap(ChatHistory(), ["role"], ["ctx a", "ctx b"])
    assert len(h) == 3
    assert h.groups() == [SYSTEM_GUIDELINES, TASK_CONTEXT, TASK_CONTEXT]
    assert [e.role for e in h.entries] == ["system", "user", "user"]
    assert h.bootstrapped


def test_bootstrap_without_context():
    h = bootstrap(ChatHistory(), ["a", "b"], [])
    assert len(h) == 2


def test_second_bootstrap_rejected():
    h = bootstrap(ChatHistory(), ["a"], [])
    with pytest.raises(AlreadyBootstrapped):
        bootstrap(h, ["b"], [])


def test_append_runtime():
    h = bootstrap(ChatHistory(), ["a"], ["b"])
    append_runtime(h, "assistant", "def main(workcell):")
    append_runtime(h, "user", "MotionException: unreachable position")
    assert h.entries[-2].role == "assistant"
    assert h.groups() == [SYSTEM_GUIDELINES, TASK_CONTEXT, RUNTIME, RUNTIME]
    assert [e.seq for e in h.entries] == [0, 1, 2, 3]


def test_append_to_fresh_history():
    with pytest.raises(NotBootstrapped):
        append_runtime(ChatHistory(), "user", "x")
    with pytest.raises(NotBootstrapped):
        render_messages(ChatHistory())


def test_render_messages_in_order():
    h = bootstrap(ChatHistory(), ["g"], ["c1", "c2"])
    assert render_messages(h) == [("system", "g"), ("user", "c1"), ("user", "c2")]
    append_runtime(h, "user", "q1")
    append_runtime(h, "assistant", "a1")
    append_runtime(h, "user", "q2")
    assert [r for r, _ in render_messages(h)[3:]] == ["user", "assistant", "user"]


def test_render_messages_redacts():
    table = AliasTable({"Aera-K4-Hanger": "HANGER_P7", "Hardcore-Bearing": "BEARING_P2"})
    h = bootstrap(ChatHistory(), ["pick the Aera-K4-Hanger"], ["Hardcore-Bearing x"])
    append_runtime(h, "user", "Aera-K4-Hanger and Hardcore-Bearing")
    for _role, text in render_messages(h, table):
        assert "Aera-K4-Hanger" not in text and "Hardcore-Bearing" not in text


def test_redact_examples():
    assert redact("anything", AliasTable()) == "anything"
    table = AliasTable({"Aera-K4-Hanger": "HANGER_P7"})
    out = redact("pick the Aera-K4-Hanger", table)
    assert out == "pick the HANGER_P7"
    assert restore(out, table) == "pick the Aera-K4-Hanger"
    overlap = AliasTable({"Kingpin Bolt": "A", "Kingpin": "B"})
    assert redact("Kingpin Bolt", overlap) == "A"
    assert redact("Kingpin nut", overlap) == "B nut"


@pytest.mark.parametrize("pairs", [
    {"a": "x", "b": "x"},      # aliases collide
    {"a": "b", "b": "c"},      # alias equals a private term
    {"": "x"},
])
def test_invalid_alias_tables(pairs):
    with pytest.raises(ValueError):
        AliasTable(pairs)


def test_alias_sidecar(tmp_path):
    assert not AliasTable.load(tmp_path / "missing.json")
    p = tmp_path / "aliases.json"
    p.write_text(json.dumps({"Kingpin Bolt": "A"}))
    assert AliasTable.load(p).pairs == {"Kingpin Bolt": "A"}
    p.write_text("[1, 2]")
    with pytest.raises(ValueError):
        AliasTable.load(p)


def test_redact_matches_oracle_on_random_concatenations():
    mapping = {"Kingpin Bolt": "A", "Kingpin": "B", "Bolt": "C", "K": "D", "pin B": "E"}
    table = AliasTable(mapping)
    pieces = list(mapping) + [" ", "x", "in", "Bo", "lt", "King"]
    rng = random.Random(1234)
    for _ in range(1000):
        text = "".join(rng.choice(pieces) for _ in range(rng.randint(0, 12)))
        assert redact(text, table) == longest_first_replace(text, mapping)


private_terms = ["Kingpin-Bolt-91257A662", "Hardcore-Bearing", "Area-K4-Hanger", "Kingpin"]
ALIASES = {t: f"@{i}@" for i, t in enumerate(private_terms)}


@given(st.lists(st.one_of(st.sampled_from(private_terms),
                          st.text(alphabet="abcKingp- 0129", max_size=8)), max_size=10))
def test_restore_inverts_redact(chunks):
    text = "".join(chunks)
    table = AliasTable(ALIASES)
    assert restore(redact(text, table), table) == text


class HistoryMachine(RuleBasedStateMachine):
    def __init__(self):
        super().__init__()
        self.h = ChatHistory()
        self.log = []

    @rule(n_g=st.integers(0, 3), n_c=st.integers(0, 3))
    def do_bootstrap(self, n_g, n_c):
        try:
            bootstrap(self.h, [f"g{i}" for i in range(n_g)], [f"c{i}" for i in range(n_c)])
        except AlreadyBootstrapped:
            return
        self.log += [f"g{i}" for i in range(n_g)] + [f"c{i}" for i in range(n_c)]

    @rule(role=st.sampled_from(["user", "assistant"]), text=st.text(max_size=5))
    def do_append(self, role, text):
        try:
            append_runtime(self.h, role, text)
        except NotBootstrapped:
            return
        self.log.append(text)

    @invariant()
    def partitioned_and_append_only(self):
        order = {SYSTEM_GUIDELINES: 0, TASK_CONTEXT: 1, RUNTIME: 2}
        ranks = [order[g] for g in self.h.groups()]
        assert ranks == sorted(ranks)
        assert [e.content for e in self.h.entries] == self.log
        seqs = [e.seq for e in self.h.entries]
        assert all(a < b for a, b in zip(seqs, seqs[1:]))


TestHistoryMachine = HistoryMachine.TestCase


def test_agent_ask_redacts_and_restores():
    table = AliasTable({"Hardcore-Bearing": "BEARING"})
    provider = ReplayProvider([TranscriptEntry(("pick BEARING",), "picked BEARING")])
    agent = Agent(provider, aliases=table)
    bootstrap(agent.history, ["role"], [])
    assert agent.ask("pick Hardcore-Bearing") == "picked Hardcore-Bearing"
    assert agent.calls == 1
    assert [e.group for e in agent.history.entries[-2:]] == [RUNTIME, RUNTIME]
