from typing import List, Optional

from sqlalchemy import ForeignKey, Integer, String, UniqueConstraint
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship


class Base(DeclarativeBase):
    pass


class LedgerRecord(Base):
    __tablename__ = "ledger"
    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    label: Mapped[str] = mapped_column(String, unique=True)

    events: Mapped[List["EventRecord"]] = relationship(
        "EventRecord", back_populates="ledger", order_by="EventRecord.position"
    )

    def __repr__(self) -> str:
        return f"LedgerRecord(id={self.id!r}, label={self.label!r})"


class EventRecord(Base):
    __tablename__ = "event"
    id: Mapped[int] = mapped_column(primary_key=True)
    ledger_id: Mapped[int] = mapped_column(ForeignKey("ledger.id"))
    position: Mapped[int] = mapped_column()
    agent: Mapped[int] = mapped_column()
    subprocess: Mapped[str] = mapped_column(String)
    # absent categories are NULL
    computation: Mapped[Optional[int]] = mapped_column()
    communication: Mapped[Optional[int]] = mapped_column()
    information_millibits: Mapped[Optional[int]] = mapped_column()
    primitive: Mapped[Optional[int]] = mapped_column()

    ledger: Mapped["LedgerRecord"] = relationship("LedgerRecord", back_populates="events")

    __table_args__ = (UniqueConstraint("ledger_id", "position", name="event_order"),)

    def __repr__(self) -> str:
        return (
            f"EventRecord(ledger_id={self.ledger_id!r}, position={self.position!r}, "
            f"agent={self.agent!r}, subprocess={self.subprocess!r})"
        )


class SweepRecord(Base):
    __tablename__ = "sweep"
    id: Mapped[int] = mapped_column(primary_key=True)
    run_label: Mapped[str] = mapped_column(String)
    n: Mapped[int] = mapped_column()
    bits: Mapped[int] = mapped_column()
    halvings: Mapped[int] = mapped_column()
    time: Mapped[int] = mapped_column()
    space: Mapped[int] = mapped_column()
    # NULL stands for infinite precision
    precision: Mapped[Optional[int]] = mapped_column()
    factor: Mapped[Optional[int]] = mapped_column()
    verified: Mapped[bool] = mapped_column()

    __table_args__ = (UniqueConstraint("run_label", "n", name="sweep_integrity"),)

    def __repr__(self) -> str:
        return f"SweepRecord(run_label={self.run_label!r}, n={self.n!r})"
