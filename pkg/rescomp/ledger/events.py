import enum
import json
import logging
import math
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from rescomp.errors import LedgerError

logger = logging.getLogger("rescomp.ledger")


class Category(str, enum.Enum):
    COMPUTATION = "computation"
    COMMUNICATION = "communication"
    INFORMATION = "information"
    PRIMITIVE = "primitive"

    @property
    def json_key(self) -> str:
        """Key of the category in ledger JSON; information is counted in milli-bits."""
        if self is Category.INFORMATION:
            return "information_millibits"
        return self.value

    @classmethod
    def from_json_key(cls, key: str) -> "Category":
        for category in cls:
            if category.json_key == key:
                return category
        raise LedgerError(f"unknown cost category {key!r}")


UNITS = {
    Category.COMPUTATION: "bit-ops",
    Category.COMMUNICATION: "bits",
    Category.INFORMATION: "milli-bits",
    Category.PRIMITIVE: "invocations",
}


class CostEvent(BaseModel):
    """Cost incurred by one anonymous agent in one subprocess.

    Attributes:
        agent (int): opaque role index; no agent is named.
        subprocess (str): protocol step, e.g. "encrypt".
        costs (dict): category -> natural amount in the category's unit.
    """

    model_config = ConfigDict(frozen=True)

    agent: int = Field(ge=0)
    subprocess: str
    costs: Dict[Category, int]

    @field_validator("costs")
    @classmethod
    def _costs(cls, costs: Dict[Category, int]) -> Dict[Category, int]:
        if not costs:
            raise ValueError("cost event needs at least one category")
        negative = [category.value for category, amount in costs.items() if amount < 0]
        if negative:
            raise ValueError(f"negative cost in {', '.join(negative)}")
        return costs

    def amount(self, category: Category) -> int:
        return self.costs.get(category, 0)

    @property
    def positive_categories(self) -> List[Category]:
        return [category for category in Category if self.amount(category) > 0]


class Ledger(BaseModel):
    model_config = ConfigDict(frozen=True)

    events: Tuple[CostEvent, ...] = ()

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


class SecurityFlag(str, enum.Enum):
    DECOMPOSABLE = "Decomposable"
    INTERACTING = "Interacting"


class SecurityVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    totals: Dict[Category, int]
    flag: SecurityFlag

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "totals": {category.json_key: amount for category, amount in self.totals.items()},
            "flag": self.flag.value,
        }


class SideChannel(BaseModel):
    """An implicit information flow next to the explicit messages of a protocol.

    `manufacturing_cost` only documents that exploiting the channel requires
    discovering it first; that cost is never ledgered.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    description: str
    manufacturing_cost: bool = False


Observable = Callable[[CostEvent], bool]


def record_event(ledger: Ledger, event: Union[CostEvent, Mapping[str, Any]]) -> Ledger:
    """Return the ledger extended by one event.

    Raises:
        LedgerError: the event has no costs or a negative amount.
    """
    if not isinstance(event, CostEvent):
        try:
            event = CostEvent.model_validate(event)
        except ValidationError as error:
            raise LedgerError(f"invalid cost event: {error.errors()[0]['msg']}") from error
    return Ledger(events=ledger.events + (event,))


def concat(first: Ledger, second: Ledger) -> Ledger:
    return Ledger(events=first.events + second.events)


def _totals(events: Iterable[CostEvent]) -> Dict[Category, int]:
    totals = {category: 0 for category in Category}
    for event in events:
        for category, amount in event.costs.items():
            totals[category] += amount
    return totals


def category_totals(ledger: Ledger) -> Dict[Category, int]:
    """Per-category sum over all events; absent categories total 0."""
    return _totals(ledger.events)


def interaction_events(ledger: Ledger) -> List[CostEvent]:
    """Events incurring a positive cost in two or more categories."""
    return [event for event in ledger.events if len(event.positive_categories) >= 2]


def timing_leak_bits(
    timing_model: Union[Callable[[Any], Hashable], Mapping[Any, Hashable]],
    message_space: Iterable[Any],
) -> float:
    """Bits leaked by a deterministic channel: log2 of its distinct durations.

    Raises:
        LedgerError: the message space is empty.
    """
    duration = timing_model.__getitem__ if isinstance(timing_model, Mapping) else timing_model
    durations = {duration(message) for message in message_space}
    if not durations:
        raise LedgerError("empty message space")
    return math.log2(len(durations))


def security_vector(ledger: Ledger, observable: Observable) -> SecurityVector:
    """Category totals of the events an adversary observes, with the interaction flag."""
    seen = Ledger(events=tuple(event for event in ledger.events if observable(event)))
    flag = SecurityFlag.INTERACTING if interaction_events(seen) else SecurityFlag.DECOMPOSABLE
    return SecurityVector(totals=category_totals(seen), flag=flag)


def agent_exposure(ledger: Ledger, observable: Observable) -> Dict[int, SecurityVector]:
    """Security vector of every agent index, restricted to that agent's observable events."""
    agents = sorted({event.agent for event in ledger.events})
    return {
        agent: security_vector(
            ledger, lambda event, agent=agent: event.agent == agent and observable(event)
        )
        for agent in agents
    }


def ledger_to_json(ledger: Ledger) -> str:
    return json.dumps(
        [
            {
                "agent": event.agent,
                "subprocess": event.subprocess,
                "costs": {category.json_key: amount for category, amount in event.costs.items()},
            }
            for event in ledger.events
        ],
        indent=2,
    )


def ledger_from_json(text: str) -> Ledger:
    """Parse ledger JSON; cost keys absent from an event mean 0.

    Raises:
        LedgerError: malformed JSON or an invalid event.
    """
    try:
        records = json.loads(text)
    except json.JSONDecodeError as error:
        raise LedgerError(f"malformed ledger JSON: {error}") from error
    if not isinstance(records, list):
        raise LedgerError("ledger JSON must be an array of events")
    ledger = Ledger()
    for record in records:
        costs = {
            Category.from_json_key(key): amount for key, amount in record.get("costs", {}).items()
        }
        ledger = record_event(ledger, {**record, "costs": costs})
    logger.debug("loaded ledger of %d events", len(ledger))
    return ledger
