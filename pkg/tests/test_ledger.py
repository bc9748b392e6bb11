import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from rescomp.errors import LedgerError
from rescomp.ledger import (
    Category,
    CostEvent,
    Ledger,
    SecurityFlag,
    agent_exposure,
    category_totals,
    concat,
    interaction_events,
    ledger_from_json,
    ledger_to_json,
    record_event,
    security_vector,
    timing_leak_bits,
)

COMP, COMM, INFO, PRIM = (
    Category.COMPUTATION,
    Category.COMMUNICATION,
    Category.INFORMATION,
    Category.PRIMITIVE,
)

events = st.builds(
    CostEvent,
    agent=st.integers(0, 3),
    subprocess=st.sampled_from(["keygen", "send", "encrypt", "decrypt"]),
    costs=st.dictionaries(
        st.sampled_from(list(Category)), st.integers(0, 10_000), min_size=1, max_size=4
    ),
)
ledgers = st.lists(events, max_size=12).map(lambda items: Ledger(events=tuple(items)))


def test_category_is_closed():
    assert [c.value for c in Category] == [
        "computation",
        "communication",
        "information",
        "primitive",
    ]


def test_record_event():
    first = CostEvent(agent=0, subprocess="a", costs={COMP: 3})
    second = CostEvent(agent=1, subprocess="b", costs={COMM: 2})
    empty = Ledger()
    one = record_event(empty, first)
    two = record_event(one, second)
    assert len(empty) == 0
    assert len(one) == 1
    assert two.events == (first, second)


def test_record_event_rejects_invalid_costs():
    with pytest.raises(LedgerError):
        record_event(Ledger(), {"agent": 0, "subprocess": "a", "costs": {}})
    with pytest.raises(LedgerError):
        record_event(Ledger(), {"agent": 0, "subprocess": "a", "costs": {COMP: -1}})
    with pytest.raises(ValidationError):
        CostEvent(agent=0, subprocess="a", costs={COMP: -1})


def test_category_totals():
    assert category_totals(Ledger()) == {COMP: 0, COMM: 0, INFO: 0, PRIM: 0}
    ledger = Ledger(
        events=(
            CostEvent(agent=0, subprocess="a", costs={COMP: 3}),
            CostEvent(agent=0, subprocess="b", costs={COMP: 4, COMM: 2}),
        )
    )
    assert category_totals(ledger) == {COMP: 7, COMM: 2, INFO: 0, PRIM: 0}


@given(ledgers)
def test_category_totals_match_recomputation(ledger):
    totals = category_totals(ledger)
    for category in Category:
        assert totals[category] == sum(event.costs.get(category, 0) for event in ledger.events)


@given(ledgers, ledgers)
def test_category_totals_are_additive(first, second):
    joined = category_totals(concat(first, second))
    a, b = category_totals(first), category_totals(second)
    assert joined == {category: a[category] + b[category] for category in Category}


def test_interaction_events():
    single = CostEvent(agent=1, subprocess="encrypt", costs={COMP: 5})
    mixed = CostEvent(agent=1, subprocess="send", costs={COMM: 128, INFO: 10})
    zero = CostEvent(agent=1, subprocess="idle", costs={COMP: 5, COMM: 0})
    assert interaction_events(Ledger()) == []
    assert interaction_events(Ledger(events=(single, mixed, zero))) == [mixed]


@given(ledgers)
def test_interaction_events_are_a_subsequence(ledger):
    found = interaction_events(ledger)
    assert all(event in ledger.events for event in found)
    assert all(len([c for c in event.costs if event.costs[c] > 0]) >= 2 for event in found)


def test_timing_leak_bits():
    assert timing_leak_bits(lambda m: 7, range(256)) == 0
    assert timing_leak_bits(lambda m: m.bit_length(), range(256)) == math.log2(9)
    assert timing_leak_bits(lambda m: m * 3, range(37)) == math.log2(37)
    assert timing_leak_bits({"a": 1, "b": 2, "c": 1}, ["a", "b", "c"]) == 1.0
    with pytest.raises(LedgerError):
        timing_leak_bits(lambda m: m, [])


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=50), st.integers(1, 17))
def test_timing_leak_bits_counts_classes(messages, modulus):
    expected = len({m % modulus for m in messages})
    assert timing_leak_bits(lambda m: m % modulus, messages) == math.log2(expected)


def test_security_vector():
    ledger = Ledger(
        events=(
            CostEvent(agent=0, subprocess="keygen", costs={COMP: 10, PRIM: 3}),
            CostEvent(agent=0, subprocess="send", costs={COMM: 16}),
        )
    )
    nothing = security_vector(ledger, lambda event: False)
    assert nothing.totals == {COMP: 0, COMM: 0, INFO: 0, PRIM: 0}
    assert nothing.flag is SecurityFlag.DECOMPOSABLE

    sends = security_vector(ledger, lambda event: event.subprocess == "send")
    assert sends.totals[COMM] == 16
    assert sends.flag is SecurityFlag.DECOMPOSABLE
    assert security_vector(ledger, lambda event: True).flag is SecurityFlag.INTERACTING


@given(ledgers, st.sets(st.integers(0, 3)))
def test_security_vector_restriction(ledger, agents):
    vector = security_vector(ledger, lambda event: event.agent in agents)
    totals = category_totals(ledger)
    assert all(vector.totals[c] <= totals[c] for c in Category)
    seen = [event for event in ledger.events if event.agent in agents]
    interacting = interaction_events(Ledger(events=tuple(seen)))
    assert (vector.flag is SecurityFlag.INTERACTING) == bool(interacting)


def test_agent_exposure():
    ledger = Ledger(
        events=(
            CostEvent(agent=0, subprocess="send", costs={COMM: 16}),
            CostEvent(agent=1, subprocess="encrypt", costs={COMP: 8, INFO: 3000}),
        )
    )
    exposure = agent_exposure(ledger, lambda event: True)
    assert set(exposure) == {0, 1}
    assert exposure[0].flag is SecurityFlag.DECOMPOSABLE
    assert exposure[1].flag is SecurityFlag.INTERACTING
    assert exposure[1].totals[INFO] == 3000


def test_ledger_json_schema():
    ledger = Ledger(
        events=(CostEvent(agent=1, subprocess="encrypt", costs={COMP: 8, INFO: 3170}),)
    )
    records = json.loads(ledger_to_json(ledger))
    assert records == [
        {
            "agent": 1,
            "subprocess": "encrypt",
            "costs": {"computation": 8, "information_millibits": 3170},
        }
    ]
    assert ledger_from_json(ledger_to_json(ledger)) == ledger


def test_ledger_from_json_errors():
    with pytest.raises(LedgerError):
        ledger_from_json("{not json")
    with pytest.raises(LedgerError):
        ledger_from_json('{"agent": 0}')
    with pytest.raises(LedgerError, match="unknown cost category"):
        ledger_from_json('[{"agent": 0, "subprocess": "a", "costs": {"energy": 1}}]')
