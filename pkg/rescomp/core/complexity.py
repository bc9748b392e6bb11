import bisect
import csv
import itertools
import logging
import math
import threading
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Set, Union

from pydantic import BaseModel, ConfigDict, Field

from rescomp.errors import GrowthError, ResourceError

from .growth import MIN_DISTINCT_SIZES, GrowthClass, classify_growth, growth_leq

logger = logging.getLogger("rescomp.core")

Amount = Union[int, float]

CSV_HEADER = ["size", "amount", "growth"]


def bit_size(k: int) -> int:
    """Size of a natural number in bits: ceil(log2(k + 1)), with |0| = 1."""
    if k < 0:
        raise ResourceError(f"size undefined for negative input {k}")
    return max(1, int(k).bit_length())


class ResourceSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    input_id: Hashable
    size: int = Field(ge=1)
    amount: Amount = Field(ge=0)


class ResourceFunction(BaseModel):
    """A named resource: maps an input value to the amount it consumes.

    Attributes:
        name (str): resource name, e.g. "time" or "precision".
        evaluate (Callable): deterministic map input -> natural amount.
        attainable (Callable, optional): returns a fresh iterator over the
            values the resource can attain, in strictly ascending order. May
            be infinite.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    evaluate: Callable[[Any], Amount]
    attainable: Optional[Callable[[], Iterable[int]]] = None

    def __call__(self, value: Any) -> Amount:
        return self.evaluate(value)


class ComplexityFunction(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: Dict[int, Amount]
    growth: Optional[GrowthClass] = None

    @property
    def sizes(self) -> List[int]:
        return sorted(self.values)

    def __getitem__(self, size: int) -> Amount:
        return self.values[size]

    def samples(self) -> List[tuple]:
        return [(size, self.values[size]) for size in self.sizes]


def sample_resource(
    resource: ResourceFunction, sizer: Callable[[Any], int], domain: Iterable[Any]
) -> List[ResourceSample]:
    return [
        ResourceSample(input_id=index, size=sizer(value), amount=resource(value))
        for index, value in enumerate(domain)
    ]


def _annotate(values: Dict[int, Amount]) -> Optional[GrowthClass]:
    amounts = set(values.values())
    if len(amounts) == 1 and all(math.isfinite(amount) for amount in amounts):
        return GrowthClass.constant()
    finite = [(size, amount) for size, amount in values.items() if math.isfinite(amount)]
    if len(finite) < MIN_DISTINCT_SIZES or len(finite) < len(values):
        logger.warning("complexity function over sizes %s left unclassified", sorted(values))
        return None
    return classify_growth(sorted(finite))


def complexity_of(
    resource: ResourceFunction, sizer: Callable[[Any], int], domain: Iterable[Any]
) -> ComplexityFunction:
    """Worst-case amount of a resource per input size.

    For each size n present in the domain the result holds the maximum of the
    resource over the inputs of size n. Sizes without inputs are absent.

    Args:
        resource (ResourceFunction): the resource to measure.
        sizer (Callable): map input -> size in bits.
        domain (Iterable): finite enumeration of inputs.

    Raises:
        ResourceError: the domain is empty.

    Returns:
        ComplexityFunction: per-size maxima annotated with their growth class.
    """
    values: Dict[int, Amount] = {}
    for sample in sample_resource(resource, sizer, domain):
        current = values.get(sample.size)
        if current is None or sample.amount > current:
            values[sample.size] = sample.amount
    if not values:
        raise ResourceError("no inputs")
    return ComplexityFunction(values=values, growth=_annotate(values))


def dominant_resources(profiles: Dict[str, ComplexityFunction]) -> Set[str]:
    """Names of the resources whose growth class is maximal."""
    if not profiles:
        raise ResourceError("no resources to compare")
    for name, function in profiles.items():
        if function.growth is None:
            raise ResourceError(f"complexity function {name!r} is unclassified")
    return {
        name
        for name, function in profiles.items()
        if all(growth_leq(other.growth, function.growth) for other in profiles.values())
    }


def overall_complexity(profiles: Dict[str, ComplexityFunction]) -> ComplexityFunction:
    """Pointwise sum of the complexity functions of the dominant resources.

    Raises:
        ResourceError: a dominant function misses sizes another one has.
    """
    dominant = sorted(dominant_resources(profiles))
    sizes = set().union(*(profiles[name].values for name in dominant))
    missing = {
        name: sorted(sizes - set(profiles[name].values))
        for name in dominant
        if sizes - set(profiles[name].values)
    }
    if missing:
        detail = "; ".join(f"{name} lacks sizes {gaps}" for name, gaps in missing.items())
        raise ResourceError(f"mismatched size ranges: {detail}")

    values = {size: sum(profiles[name].values[size] for name in dominant) for size in sizes}
    try:
        growth = _annotate(values)
    except GrowthError:
        growth = None
    if growth is None:
        growth = profiles[dominant[0]].growth
    return ComplexityFunction(values=values, growth=growth)


class _AttainableIndex:
    """Lazily materialized prefix of an ascending attainable-value enumeration."""

    def __init__(self, enumerate_values: Callable[[], Iterable[int]]):
        self._iterator: Iterator[int] = iter(enumerate_values())
        self._prefix: List[int] = []
        self._exhausted = False
        self._lock = threading.Lock()

    def rank(self, value: Amount) -> int:
        with self._lock:
            while not self._exhausted and (not self._prefix or self._prefix[-1] < value):
                try:
                    nxt = next(self._iterator)
                except StopIteration:
                    self._exhausted = True
                    break
                if self._prefix and nxt <= self._prefix[-1]:
                    raise ResourceError("attainable values must be strictly ascending")
                self._prefix.append(nxt)
            position = bisect.bisect_left(self._prefix, value)
            if position < len(self._prefix) and self._prefix[position] == value:
                return position
        raise ResourceError("value outside declared attainable set")


def normalize(resource: ResourceFunction) -> ResourceFunction:
    """Relabel a resource by the rank of its values among the attainable ones.

    The result is order-isomorphic to the input and attains an initial
    segment of the natural numbers, so normalizing twice changes nothing.

    Raises:
        ResourceError: the resource declares no attainable set, or evaluates
            to a value outside it.
    """
    if resource.attainable is None:
        raise ResourceError(f"resource {resource.name!r} declares no attainable set")
    index = _AttainableIndex(resource.attainable)

    def evaluate(value: Any) -> int:
        return index.rank(resource(value))

    return ResourceFunction(
        name=resource.name, evaluate=evaluate, attainable=lambda: itertools.count()
    )


def _format_amount(amount: Amount) -> str:
    return "inf" if amount == math.inf else str(amount)


def _parse_amount(text: str) -> Amount:
    if text.strip() == "inf":
        return math.inf
    return int(text) if text.strip().lstrip("-").isdigit() else float(text)


def write_complexity_csv(function: ComplexityFunction, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    tag = function.growth.tag if function.growth is not None else ""
    for size, amount in function.samples():
        writer.writerow([size, _format_amount(amount), tag])


def read_complexity_csv(stream) -> ComplexityFunction:
    reader = csv.DictReader(stream)
    if reader.fieldnames != CSV_HEADER:
        raise ResourceError(f"expected header {','.join(CSV_HEADER)}")
    values: Dict[int, Amount] = {}
    tags = set()
    for row in reader:
        values[int(row["size"])] = _parse_amount(row["amount"])
        tags.add(row["growth"])
    if len(tags) > 1:
        raise ResourceError(f"inconsistent growth tags {sorted(tags)}")
    tag = tags.pop() if tags else ""
    return ComplexityFunction(values=values, growth=GrowthClass.from_tag(tag) if tag else None)
