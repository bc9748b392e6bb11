import logging
import math
import threading
from typing import Iterable, List, Optional

from sqlalchemy import func, select
from sqlalchemy.exc import IntegrityError, NoResultFound
from sqlalchemy.orm import Session

from rescomp.factorizer.sweep import SweepRow
from rescomp.ledger import Category, CostEvent, Ledger

from .model import Base, EventRecord, LedgerRecord, SweepRecord

logger = logging.getLogger("rescomp.crud")

_COLUMNS = {
    Category.COMPUTATION: "computation",
    Category.COMMUNICATION: "communication",
    Category.INFORMATION: "information_millibits",
    Category.PRIMITIVE: "primitive",
}


def _event_record(ledger_id: int, position: int, event: CostEvent) -> EventRecord:
    record = EventRecord(
        ledger_id=ledger_id, position=position, agent=event.agent, subprocess=event.subprocess
    )
    for category, amount in event.costs.items():
        setattr(record, _COLUMNS[category], amount)
    return record


def _cost_event(record: EventRecord) -> CostEvent:
    costs = {
        category: getattr(record, column)
        for category, column in _COLUMNS.items()
        if getattr(record, column) is not None
    }
    return CostEvent(agent=record.agent, subprocess=record.subprocess, costs=costs)


class Crud:
    """Single owner of persisted ledgers and sweeps.

    Appends are serialized through one lock, so event positions stay dense
    and ordered even when several threads record into the same ledger.
    """

    def __init__(self, engine):
        self._engine = engine
        self._lock = threading.Lock()
        self.IntegrityError = IntegrityError
        self.NoResultFound = NoResultFound

        Base.metadata.create_all(self._engine)

    def add_ledger(self, label: str, ledger: Optional[Ledger] = None) -> int:
        """Store a ledger under a unique label.

        Args:
            label (str): name of the ledger, e.g. "toy-rsa-32".
            ledger (Ledger, optional): events to store with it. Defaults to None.

        Raises:
            IntegrityError: the label is taken.

        Returns:
            int: primary key of the new ledger.
        """
        with self._lock, Session(self._engine) as session:
            record = LedgerRecord(label=label)
            session.add(record)
            try:
                session.flush()
                events = ledger.events if ledger is not None else ()
                session.add_all(
                    [_event_record(record.id, i, event) for i, event in enumerate(events)]
                )
                session.commit()
            except IntegrityError:
                logger.error("IntegrityError while adding ledger %r", label)
                session.rollback()
                raise
            return record.id

    def append_event(self, ledger_id: int, event: CostEvent) -> int:
        """Append one event to a stored ledger and return its position.

        Raises:
            NoResultFound: no ledger with this id.
        """
        with self._lock, Session(self._engine) as session:
            session.scalars(select(LedgerRecord).where(LedgerRecord.id == ledger_id)).one()
            last = session.scalar(
                select(func.max(EventRecord.position)).where(EventRecord.ledger_id == ledger_id)
            )
            position = 0 if last is None else last + 1
            session.add(_event_record(ledger_id, position, event))
            try:
                session.commit()
            except IntegrityError:
                logger.error("IntegrityError while appending to ledger %d", ledger_id)
                session.rollback()
                raise
            return position

    def get_ledger(self, ledger_id: int) -> Ledger:
        with Session(self._engine) as session:
            session.scalars(select(LedgerRecord).where(LedgerRecord.id == ledger_id)).one()
            stmt = (
                select(EventRecord)
                .where(EventRecord.ledger_id == ledger_id)
                .order_by(EventRecord.position)
            )
            return Ledger(events=tuple(_cost_event(record) for record in session.scalars(stmt)))

    def get_ledger_by_label(self, label: str) -> Ledger:
        with Session(self._engine) as session:
            stmt = select(LedgerRecord.id).where(LedgerRecord.label == label)
            ledger_id = session.scalars(stmt).one()
        return self.get_ledger(ledger_id)

    def get_ledgers(self) -> List[LedgerRecord]:
        """All stored ledgers, without their events."""
        with Session(self._engine) as session:
            return session.scalars(select(LedgerRecord).order_by(LedgerRecord.id)).all()

    def add_sweep_rows(self, run_label: str, rows: Iterable[SweepRow]) -> None:
        """Store the rows of one sweep; (run_label, n) must be new.

        Raises:
            IntegrityError: some n is already stored under run_label.
        """
        with self._lock, Session(self._engine) as session:
            session.add_all(
                [
                    SweepRecord(
                        run_label=run_label,
                        precision=None if row.precision == math.inf else row.precision,
                        **row.model_dump(exclude={"precision"}),
                    )
                    for row in rows
                ]
            )
            try:
                session.commit()
            except IntegrityError:
                logger.error("IntegrityError while storing sweep %r", run_label)
                session.rollback()
                raise

    def get_sweep_rows(
        self, run_label: str, start: Optional[int] = None, end: Optional[int] = None
    ) -> List[SweepRow]:
        """Rows of a stored sweep ordered by n.

        Args:
            run_label (str): label the sweep was stored under.
            start (int, optional): smallest n to return. Defaults to None.
            end (int, optional): largest n to return. Defaults to None.

        Returns:
            List[SweepRow]: the rows; empty when the label is unknown.
        """
        with Session(self._engine) as session:
            stmt = select(SweepRecord).where(SweepRecord.run_label == run_label)
            if start is not None:
                stmt = stmt.where(SweepRecord.n >= start)
            if end is not None:
                stmt = stmt.where(SweepRecord.n <= end)
            stmt = stmt.order_by(SweepRecord.n)
            return [
                SweepRow(
                    n=record.n,
                    bits=record.bits,
                    halvings=record.halvings,
                    time=record.time,
                    space=record.space,
                    precision=math.inf if record.precision is None else record.precision,
                    factor=record.factor,
                    verified=record.verified,
                )
                for record in session.scalars(stmt)
            ]
