import enum
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from rescomp.errors import GrowthError

logger = logging.getLogger("rescomp.core")

MIN_DISTINCT_SIZES = 4
MAX_POLYNOMIAL_DEGREE = 6
TIE_TOLERANCE = 1e-9


class GrowthKind(str, enum.Enum):
    CONSTANT = "const"
    LOGARITHMIC = "log"
    POLYNOMIAL = "poly"
    EXPONENTIAL = "exp"


_KIND_ORDER = {
    GrowthKind.CONSTANT: 0,
    GrowthKind.LOGARITHMIC: 1,
    GrowthKind.POLYNOMIAL: 2,
    GrowthKind.EXPONENTIAL: 3,
}


class GrowthClass(BaseModel):
    """Asymptotic growth class of a complexity function.

    Classes are totally ordered: Constant < Logarithmic < Polynomial(d) <
    Polynomial(d') < Exponential for d < d'.
    """

    model_config = ConfigDict(frozen=True)

    kind: GrowthKind
    degree: Optional[int] = None

    @model_validator(mode="after")
    def _check_degree(self) -> "GrowthClass":
        if self.kind is GrowthKind.POLYNOMIAL:
            if self.degree is None or self.degree < 1:
                raise ValueError("polynomial growth needs a degree >= 1")
        elif self.degree is not None:
            raise ValueError("only polynomial growth carries a degree")
        return self

    @classmethod
    def constant(cls) -> "GrowthClass":
        return cls(kind=GrowthKind.CONSTANT)

    @classmethod
    def logarithmic(cls) -> "GrowthClass":
        return cls(kind=GrowthKind.LOGARITHMIC)

    @classmethod
    def polynomial(cls, degree: int) -> "GrowthClass":
        return cls(kind=GrowthKind.POLYNOMIAL, degree=degree)

    @classmethod
    def exponential(cls) -> "GrowthClass":
        return cls(kind=GrowthKind.EXPONENTIAL)

    @property
    def rank(self) -> Tuple[int, int]:
        return (_KIND_ORDER[self.kind], self.degree or 0)

    @property
    def tag(self) -> str:
        """Text tag used in CSV output: const, log, poly:<d> or exp."""
        if self.kind is GrowthKind.POLYNOMIAL:
            return f"poly:{self.degree}"
        return self.kind.value

    @classmethod
    def from_tag(cls, tag: str) -> "GrowthClass":
        tag = tag.strip()
        if tag.startswith("poly:"):
            return cls.polynomial(int(tag.split(":", 1)[1]))
        try:
            return cls(kind=GrowthKind(tag))
        except ValueError:
            raise GrowthError(f"unknown growth tag {tag!r}") from None

    def __str__(self) -> str:
        return self.tag


def growth_leq(f: GrowthClass, g: GrowthClass) -> bool:
    """True iff f is in O(g) at the level of growth classes."""
    return f.rank <= g.rank


Fit = Tuple[GrowthClass, np.ndarray]


def _fit_constant(sizes: np.ndarray, amounts: np.ndarray) -> Optional[Fit]:
    return GrowthClass.constant(), np.full_like(amounts, amounts.mean())


def _fit_logarithmic(sizes: np.ndarray, amounts: np.ndarray) -> Optional[Fit]:
    slope, intercept = np.polyfit(np.log(sizes), amounts, 1)
    return GrowthClass.logarithmic(), intercept + slope * np.log(sizes)


def _fit_polynomial(sizes: np.ndarray, amounts: np.ndarray) -> Optional[Fit]:
    positive = amounts > 0
    log_sizes = np.log(sizes[positive])
    if len(np.unique(log_sizes)) < 2:
        return None
    log_amounts = np.log(amounts[positive])
    slope = np.polyfit(log_sizes, log_amounts, 1)[0]
    degree = int(min(max(math.floor(slope + 0.5), 1), MAX_POLYNOMIAL_DEGREE))
    log_scale = float(np.mean(log_amounts - degree * log_sizes))
    return GrowthClass.polynomial(degree), np.exp(log_scale) * sizes.astype(float) ** degree


def _fit_exponential(sizes: np.ndarray, amounts: np.ndarray) -> Optional[Fit]:
    positive = amounts > 0
    if len(np.unique(sizes[positive])) < 2:
        return None
    rate, intercept = np.polyfit(sizes[positive], np.log(amounts[positive]), 1)
    with np.errstate(over="ignore"):
        return GrowthClass.exponential(), np.exp(intercept + rate * sizes)


_FITS: List[Callable[[np.ndarray, np.ndarray], Optional[Fit]]] = [
    _fit_constant,
    _fit_logarithmic,
    _fit_polynomial,
    _fit_exponential,
]


def classify_growth(samples: Sequence[Tuple[int, float]]) -> GrowthClass:
    """Pick the growth class that best explains (size, amount) samples.

    Every candidate model is fitted on its own transformed axes (constant and
    logarithmic on (n, a), polynomial on log-log with the slope rounded to a
    degree in 1..6, exponential on (n, log a)) and scored by the squared
    residual of log(1 + a). The minimal score wins; scores within
    TIE_TOLERANCE of it go to the smaller class.

    Args:
        samples (Sequence[Tuple[int, float]]): (size, amount) pairs, sizes >= 1.

    Raises:
        GrowthError: fewer than 4 distinct sizes, or non-finite amounts.

    Returns:
        GrowthClass: the chosen class.
    """
    if len({size for size, _ in samples}) < MIN_DISTINCT_SIZES:
        raise GrowthError("insufficient samples")
    sizes = np.array([size for size, _ in samples], dtype=float)
    amounts = np.array([amount for _, amount in samples], dtype=float)
    if not np.all(np.isfinite(amounts)):
        raise GrowthError("amounts must be finite")
    if np.any(sizes < 1) or np.any(amounts < 0):
        raise GrowthError("sizes must be >= 1 and amounts >= 0")

    target = np.log1p(amounts)
    scored = []
    for fit in _FITS:
        result = fit(sizes, amounts)
        if result is None:
            continue
        growth, predicted = result
        with np.errstate(over="ignore", invalid="ignore"):
            residual = float(np.sum((np.log1p(np.clip(predicted, 0, None)) - target) ** 2))
        if math.isnan(residual):
            residual = math.inf
        scored.append((growth, residual))
        logger.debug("growth fit %s residual %.6g", growth.tag, residual)

    best = min(residual for _, residual in scored)
    for growth, residual in sorted(scored, key=lambda item: item[0].rank):
        if residual <= best + TIE_TOLERANCE:
            return growth
    raise GrowthError("no growth model fitted")
