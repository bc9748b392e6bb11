import logging
import math
from typing import List, Literal, NamedTuple, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict

from rescomp.config import settings
from rescomp.core import bit_size
from rescomp.errors import DeviceError
from rescomp.precision import (
    Analytic,
    DeviceModel,
    Draw,
    ErrorVector,
    ParameterSpec,
    Role,
    apply_input_error,
    apply_output_error,
    coordinate_threshold,
    precision,
)

from .geometry import (
    SensorMode,
    divisor_readings,
    factor_from_reading,
    minimal_readings,
    round_half_up,
    sensor_coord_for_factor,
    small_divisors,
)

logger = logging.getLogger("rescomp.factorizer")

MAX_ENCODED_BITS = 25
LAMBDA_MIN = 2 / 2**MAX_ENCODED_BITS
READING_MIN = 1e-12
MAX_BREAKPOINTS = 100_000

Precision = Union[int, float]


class Bisection(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["bisection"] = "bisection"
    tol: float = 1e-9


ThresholdMethod = Union[Analytic, Bisection]


class DigitalPre(NamedTuple):
    two_over_n: float
    root_two_over_n: float
    bit_ops: int


class Candidate(BaseModel):
    model_config = ConfigDict(frozen=True)

    factor: int
    verified: bool


class Resources(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: int
    space: int
    precision: Precision


class FactorizationOutcome(BaseModel):
    """Result of one run of the analogue factorizer."""

    model_config = ConfigDict(frozen=True)

    requested_n: int
    halvings: int
    corrected_m: int
    candidates: List[Candidate]
    resources: Resources
    suspect_miscorrection: bool = False

    @property
    def odd_part(self) -> int:
        return self.requested_n >> self.halvings

    @property
    def nontrivial_factor(self) -> Optional[int]:
        """Smallest verified candidate greater than 1."""
        factors = sorted(c.factor for c in self.candidates if c.verified and c.factor > 1)
        return factors[0] if factors else None

    def summary(self) -> str:
        if self.suspect_miscorrection:
            return f"n = {self.requested_n}: suspect miscorrection to m = {self.corrected_m}"
        if self.nontrivial_factor is None:
            return f"n = {self.requested_n}: no nontrivial factor"
        return f"n = {self.requested_n}: factor {self.nontrivial_factor}"


def _check_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise DeviceError(f"expected odd n >= 3, got {n}")


def digital_bit_ops(n: int) -> int:
    """Bit operations charged to one quadratic digital step on n."""
    return settings.bit_op_constant * bit_size(n) ** 2


def fractional_bits(n: int) -> int:
    """Fractional bits of 2/n and sqrt(2/n) from which n is recoverable."""
    return 2 * bit_size(n) + 2


def digital_pre(n: int) -> DigitalPre:
    """Step 1: the two values the analogue apparatus is set up with."""
    _check_odd(n)
    if bit_size(n) > MAX_ENCODED_BITS:
        raise DeviceError(f"n needs {fractional_bits(n)} fractional bits; too large to encode")
    two_over_n = 2 / n
    return DigitalPre(two_over_n, math.sqrt(two_over_n), digital_bit_ops(n))


def corrected_target(wavelength: float) -> int:
    """Error correction: act as though n is the integer nearest 2 / wavelength."""
    return round_half_up(2 / wavelength)


def _wavelength_breakpoints(n: int, index: int, low: float, high: float) -> List[float]:
    first = max(math.ceil(2 / high - 0.5), 0)
    last = math.floor(2 / low - 0.5)
    if last - first <= MAX_BREAKPOINTS:
        return [2 / (k + 0.5) for k in range(first, last + 1)]
    # a band this wide already leaves the cell of n; keep its edge corrections and those around n
    kept = {first, first + 1, last - 1, last, n - 1, n}
    return [2 / (k + 0.5) for k in sorted(kept) if first <= k <= last]


def _reading_breakpoints(n: int, index: int, low: float, high: float) -> List[float]:
    first = math.ceil(math.sqrt(n * low / (2 - low)) - 0.5)
    last = math.floor(math.sqrt(n * high / (2 - high)) - 0.5)
    return [2 * (k + 0.5) ** 2 / (n + (k + 0.5) ** 2) for k in range(max(first, 0), last + 1)]


def _wavelength_param() -> ParameterSpec:
    return ParameterSpec(name="wavelength", role=Role.INPUT, lower=LAMBDA_MIN, upper=2.0)


def wavelength_threshold(n: int) -> float:
    return 1 / (n * (n + 0.5))


def readout_threshold(n: int) -> float:
    """Largest additive error on the sensor coordinate that every divisor reading survives."""
    _check_odd(n)

    def coord(u: float) -> float:
        return 2 * u * u / (n + u * u)

    margins = []
    for a in small_divisors(n):
        c = sensor_coord_for_factor(a, n)
        margins.append(c - coord(a - 0.5))
        if coord(a + 0.5) <= 1:
            margins.append(coord(a + 0.5) - c)
    return min(margins)


def wavelength_device() -> DeviceModel:
    """The factorizer seen through its wavelength alone.

    The only output is the error-corrected target, read without error; an
    input is handled correctly iff the target coincides with n.
    """
    return DeviceModel(
        name="wavelength",
        input_params=(_wavelength_param(),),
        encode=lambda n: (digital_pre(n).two_over_n,),
        compute=lambda implemented: [(2 / implemented[0],)],
        interpret=lambda n, measured: round_half_up(measured[0]),
        correct_outputs=lambda n: frozenset({n}),
        input_breakpoints=_wavelength_breakpoints,
        thresholds=lambda n: (wavelength_threshold(n),),
    )


def readout_device() -> DeviceModel:
    """The factorizer seen through its wavelength and its sensor coordinate."""
    return DeviceModel(
        name="readout",
        input_params=(_wavelength_param(),),
        output_params=(
            ParameterSpec(name="sensor_c", role=Role.OUTPUT, lower=READING_MIN, upper=1.0),
        ),
        encode=lambda n: (digital_pre(n).two_over_n,),
        compute=lambda implemented: [
            (reading.c,) for reading in divisor_readings(corrected_target(implemented[0]))
        ],
        interpret=lambda n, measured: factor_from_reading(measured[0], n),
        correct_outputs=lambda n: frozenset(small_divisors(n)),
        input_breakpoints=_wavelength_breakpoints,
        output_breakpoints=_reading_breakpoints,
        thresholds=lambda n: (wavelength_threshold(n), readout_threshold(n)),
    )


def corrigible_epsilon_threshold(n: int, method: ThresholdMethod = Analytic()) -> float:
    """Largest additive wavelength error the device still corrects for n.

    Raises:
        DeviceError: n is not odd >= 3, or the bisection tolerance is not positive.
    """
    _check_odd(n)
    if isinstance(method, Bisection):
        if not method.tol > 0:
            raise DeviceError("tol must be > 0")
        return coordinate_threshold(n, wavelength_device(), 0, tol=method.tol, start=1 / n)
    return wavelength_threshold(n)


def _strip_twos(n: int) -> tuple:
    halvings = 0
    while n % 2 == 0:
        n //= 2
        halvings += 1
    return n, halvings


def run_device(
    n: int,
    errors: Union[ErrorVector, Sequence[float]] = (0.0, 0.0),
    draw: Draw = Draw(),
    sensor_mode: SensorMode = Analytic(),
) -> FactorizationOutcome:
    """Run the five steps of the device on n.

    Factors of two are stripped by halving first. The wavelength 2/m of the
    odd part m is perturbed per the first error term and corrected to the
    nearest integer target; every minimal reading of the sensor is perturbed
    per the second error term and interpreted against m. Candidates are
    verified by trial division.

    Args:
        n (int): number to factorize, >= 2.
        errors (ErrorVector | Sequence[float]): (wavelength error, sensor error).
        draw (Draw): how perturbed values are picked from their bands.
        sensor_mode (SensorMode): how minima are located on the sensor.

    Raises:
        DeviceError: n < 2.

    Returns:
        FactorizationOutcome: candidates, corrected target and resource tallies.
    """
    if n < 2:
        raise DeviceError("n < 2")
    if not isinstance(errors, ErrorVector):
        errors = ErrorVector(entries=tuple(float(e) for e in errors))
    device = readout_device()
    input_errors, output_errors = errors.split(device)

    odd, halvings = _strip_twos(n)
    halving_ops = halvings * bit_size(n)
    if odd == 1:
        logger.info("n = %d is a power of two; nothing left for the analogue stage", n)
        return FactorizationOutcome(
            requested_n=n,
            halvings=halvings,
            corrected_m=1,
            candidates=[],
            resources=Resources(time=halving_ops, space=settings.space_units, precision=0),
        )

    pre = digital_pre(odd)
    wavelength = apply_input_error((pre.two_over_n,), device, input_errors, draw)[0]
    m = corrected_target(wavelength)
    if m != odd:
        logger.warning("wavelength %.12g corrected to m = %d instead of %d", wavelength, m, odd)

    readings = minimal_readings(m, sensor_mode) if m >= 3 and m % 2 else divisor_readings(m)
    candidates = []
    for i, reading in enumerate(readings):
        measured = apply_output_error((reading.c,), device, output_errors, draw, stream=1 + i)[0]
        factor = factor_from_reading(measured, odd)
        candidates.append(Candidate(factor=factor, verified=factor >= 1 and odd % factor == 0))

    time = settings.analogue_time_units + pre.bit_ops + digital_bit_ops(odd) + halving_ops
    resources = Resources(
        time=time,
        space=settings.space_units,
        precision=precision(odd, wavelength_device(), Analytic()),
    )
    return FactorizationOutcome(
        requested_n=n,
        halvings=halvings,
        corrected_m=m,
        candidates=candidates,
        resources=resources,
        suspect_miscorrection=m != odd or any(not c.verified for c in candidates),
    )
