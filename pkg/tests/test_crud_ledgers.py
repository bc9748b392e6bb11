from typing import Tuple

import pytest
from sqlalchemy import select
from sqlalchemy.orm import Session

from rescomp.crud.crud import Crud
from rescomp.crud.model import EventRecord, LedgerRecord
from rescomp.ledger import Category, CostEvent, Ledger, run_toy_rsa


def _event(agent: int, subprocess: str, **costs: int) -> CostEvent:
    return CostEvent(
        agent=agent,
        subprocess=subprocess,
        costs={Category(name): amount for name, amount in costs.items()},
    )


def test_add_ledger(crud_session_in_memory: Tuple[Crud, Session]):
    crud_in_memory, session = crud_session_in_memory
    ledger, _ = run_toy_rsa(16, 7, seed=1)

    ledger_id = crud_in_memory.add_ledger("toy-rsa-16", ledger)

    with session() as s:
        record = s.scalars(select(LedgerRecord).where(LedgerRecord.id == ledger_id)).one()
        assert record.label == "toy-rsa-16"
        assert [event.position for event in record.events] == [0, 1, 2, 3, 4]
        assert record.events[1].communication == 16 + 17
        assert record.events[1].computation is None
    assert crud_in_memory.get_ledger(ledger_id) == ledger
    assert crud_in_memory.get_ledger_by_label("toy-rsa-16") == ledger


def test_add_empty_ledger(crud_in_memory: Crud):
    ledger_id = crud_in_memory.add_ledger("empty")
    assert crud_in_memory.get_ledger(ledger_id) == Ledger()
    assert [record.label for record in crud_in_memory.get_ledgers()] == ["empty"]


def test_append_event(crud_session_in_memory: Tuple[Crud, Session]):
    crud_in_memory, session = crud_session_in_memory
    ledger_id = crud_in_memory.add_ledger("appended")

    first = _event(0, "compute", computation=10)
    second = _event(1, "send", communication=8, information=500)
    assert crud_in_memory.append_event(ledger_id, first) == 0
    assert crud_in_memory.append_event(ledger_id, second) == 1

    assert crud_in_memory.get_ledger(ledger_id) == Ledger(events=(first, second))
    with session() as s:
        result = s.scalars(select(EventRecord).order_by(EventRecord.position)).all()
        assert [record.information_millibits for record in result] == [None, 500]


def test_duplicate_label(crud_in_memory: Crud):
    crud_in_memory.add_ledger("twice")
    with pytest.raises(crud_in_memory.IntegrityError):
        crud_in_memory.add_ledger("twice", Ledger(events=(_event(0, "x", primitive=1),)))
    assert len(crud_in_memory.get_ledgers()) == 1


def test_missing_ledger(crud_in_memory: Crud):
    with pytest.raises(crud_in_memory.NoResultFound):
        crud_in_memory.get_ledger(999)
    with pytest.raises(crud_in_memory.NoResultFound):
        crud_in_memory.append_event(999, _event(0, "x", computation=1))
    with pytest.raises(crud_in_memory.NoResultFound):
        crud_in_memory.get_ledger_by_label("nope")
