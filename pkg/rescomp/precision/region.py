import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from rescomp.errors import PrecisionError

from .model import (
    Analytic,
    Breakpoints,
    DeviceModel,
    Draw,
    DrawKind,
    ErrorVector,
    MeasureMode,
    MonteCarlo,
    ParameterSpec,
    PreciseErrorRegion,
    PrecisionVerdict,
    Values,
)

logger = logging.getLogger("rescomp.precision")

THRESHOLD_CAP = 1e12
THRESHOLD_TOLERANCE = 1e-13

Precision = Union[int, float]


def _perturb(
    values: Values,
    params: Sequence[ParameterSpec],
    errors: Sequence[float],
    draw: Draw,
    stream: int,
) -> Values:
    if len(errors) != len(params):
        raise PrecisionError(f"expected {len(params)} error terms, got {len(errors)}")
    if len(values) < len(params):
        raise PrecisionError(f"expected {len(params)} parameter values, got {len(values)}")
    for param, value, error in zip(params, values, errors):
        param.check_error(error)
        if not param.contains(value):
            raise PrecisionError(
                f"{param.name} = {value} outside [{param.lower}, {param.upper}]"
            )
    if draw.kind is DrawKind.EXACT:
        return tuple(values)

    bands = [param.band(value, error) for param, value, error in zip(params, values, errors)]
    if draw.kind is DrawKind.WORST_CASE:
        picked = [low if draw.endpoint == "low" else high for low, high in bands]
    else:
        rng = draw.generator(stream)
        picked = [float(rng.uniform(low, high)) if high > low else low for low, high in bands]
    return tuple(picked) + tuple(values[len(params):])


def apply_input_error(
    intended: Values, device: DeviceModel, errors: Sequence[float], draw: Draw, stream: int = 0
) -> Values:
    """Implemented input value for an intended one under the input error relation.

    Args:
        intended (Values): intended value of every input parameter.
        device (DeviceModel): the device receiving the input.
        errors (Sequence[float]): one error term per input parameter.
        draw (Draw): Exact keeps the intended value, WorstCase picks a band
            endpoint, Random draws uniformly inside each band.
        stream (int, optional): seed substream for Random draws. Defaults to 0.

    Raises:
        PrecisionError: invalid error term or intended value outside its interval.

    Returns:
        Values: the implemented input value.
    """
    return _perturb(intended, device.input_params, errors, draw, stream)


def apply_output_error(
    true_output: Values, device: DeviceModel, errors: Sequence[float], draw: Draw, stream: int = 1
) -> Values:
    """Measured output value for a true one under the output error relation."""
    return _perturb(true_output, device.output_params, errors, draw, stream)


def _axis(
    param: ParameterSpec,
    value: float,
    error: float,
    x: Any,
    index: int,
    breakpoints: Optional[Breakpoints],
    grid: int,
) -> List[float]:
    low, high = param.band(value, error)
    if high <= low:
        return [low]
    if breakpoints is None:
        return sorted({*np.linspace(low, high, grid).tolist(), min(max(value, low), high)})
    inner = [b for b in breakpoints(x, index, low, high) if low <= b <= high]
    points = sorted({low, high, *inner})
    midpoints = [(a + b) / 2 for a, b in zip(points, points[1:])]
    return points + midpoints


def _candidate_outputs(
    errors: Values, x: Any, device: DeviceModel, intended: Values
) -> Iterator[Any]:
    p = len(device.input_params)
    q = len(device.output_params)
    input_axes = [
        _axis(param, intended[j], errors[j], x, j, device.input_breakpoints, device.sample_grid)
        for j, param in enumerate(device.input_params)
    ]
    for implemented in itertools.product(*input_axes):
        for true_output in device.compute(tuple(implemented)):
            output_axes = [
                _axis(
                    param,
                    true_output[k],
                    errors[p + k],
                    x,
                    k,
                    device.output_breakpoints,
                    device.sample_grid,
                )
                for k, param in enumerate(device.output_params)
            ]
            for measured in itertools.product(*output_axes):
                yield device.interpret(x, tuple(measured) + tuple(true_output[q:]))


def _entries(errors: Union[ErrorVector, Sequence[float]], device: DeviceModel) -> Values:
    if not isinstance(errors, ErrorVector):
        errors = ErrorVector(entries=tuple(float(e) for e in errors))
    inputs, outputs = errors.split(device)
    return inputs + outputs


def _correct_outputs(x: Any, device: DeviceModel) -> frozenset:
    if device.correct_outputs is None:
        raise PrecisionError("undecidable without enumerator")
    return device.correct_outputs(x)


def yields(errors: Union[ErrorVector, Sequence[float]], x: Any, device: DeviceModel) -> Set[Any]:
    """Interpreted outputs z with x (device, errors)-yielding z.

    Built from the explicit chain intended -> implemented -> true -> measured
    -> interpreted, over band endpoints, breakpoints and the midpoints between
    them (or a sampling grid when the device declares no breakpoints).
    """
    entries = _entries(errors, device)
    return set(_candidate_outputs(entries, x, device, device.encode(x)))


def check_precise(
    errors: Union[ErrorVector, Sequence[float]], x: Any, device: DeviceModel
) -> PrecisionVerdict:
    """Decide whether an error is precise for x, and whether the verdict was sampled."""
    correct = _correct_outputs(x, device)
    entries = _entries(errors, device)
    sampled = not device.exact_verdicts
    if sampled:
        logger.debug("sampled verdict for %s: no breakpoints declared", device.name)
    precise = all(z in correct for z in _candidate_outputs(entries, x, device, device.encode(x)))
    return PrecisionVerdict(precise=precise, sampled=sampled)


def is_precise_for(
    errors: Union[ErrorVector, Sequence[float]], x: Any, device: DeviceModel
) -> bool:
    """True iff every output x yields under the error is a correct output.

    Raises:
        PrecisionError: the device has no output-set enumerator.
    """
    return check_precise(errors, x, device).precise


def coordinate_threshold(
    x: Any,
    device: DeviceModel,
    index: int,
    tol: float = THRESHOLD_TOLERANCE,
    start: Optional[float] = None,
) -> float:
    """Supremum of the error term on one coordinate that keeps x precise.

    Other coordinates stay at their neutral error. The search doubles an
    upper guess until the error stops being precise, then bisects down to
    `tol`. Returns infinity when no failure shows up below THRESHOLD_CAP.
    """
    if not tol > 0:
        raise PrecisionError("tolerance must be > 0")
    params = device.parameters
    neutral = [param.neutral_error for param in params]

    def precise_at(error: float) -> bool:
        probe = list(neutral)
        probe[index] = error
        return is_precise_for(probe, x, device)

    base = neutral[index]
    if not precise_at(base):
        return base
    step = start if start is not None else (params[index].error_bound or 1.0)
    good, bad = base, base + step
    while precise_at(bad):
        good = bad
        step *= 2
        bad = base + step
        if step > THRESHOLD_CAP:
            return math.inf
    while bad - good > tol:
        middle = (good + bad) / 2
        if middle <= good or middle >= bad:
            break
        if precise_at(middle):
            good = middle
        else:
            bad = middle
    return good


def _analytic_region(x: Any, device: DeviceModel) -> PreciseErrorRegion:
    if device.thresholds is not None:
        thresholds = tuple(float(t) for t in device.thresholds(x))
    else:
        thresholds = tuple(coordinate_threshold(x, device, i) for i in range(device.dimension))
    lengths = [t - param.neutral_error for t, param in zip(thresholds, device.parameters)]
    unbounded = any(math.isinf(length) for length in lengths)
    if unbounded:
        logger.warning("precise-error region of %s for %r is unbounded", device.name, x)
        measure = math.inf
    else:
        measure = float(np.prod(lengths)) if lengths else 1.0

    def membership(error: ErrorVector) -> bool:
        return is_precise_for(error, x, device)

    return PreciseErrorRegion(
        dimension=device.dimension,
        measure=measure,
        mode="analytic",
        unbounded=unbounded,
        thresholds=thresholds,
        membership=membership,
    )


def _monte_carlo_region(x: Any, device: DeviceModel, mode: MonteCarlo) -> PreciseErrorRegion:
    params = device.parameters
    bounds = mode.bounds or tuple(param.error_bound for param in params)
    if len(bounds) != device.dimension or any(bound is None for bound in bounds):
        raise PrecisionError("MonteCarlo mode requires a declared bounding box")
    lows = np.array([param.neutral_error for param in params])
    highs = np.array(bounds, dtype=float)
    if np.any(highs < lows):
        raise PrecisionError("bounding box below the neutral error")
    volume = float(np.prod(highs - lows))

    correct = _correct_outputs(x, device)
    intended = device.encode(x)
    chunks = [
        (i, min(mode.chunk_size, mode.samples - start))
        for i, start in enumerate(range(0, mode.samples, mode.chunk_size))
    ]

    def hits_in(chunk: Tuple[int, int]) -> int:
        index, size = chunk
        rng = np.random.default_rng(np.random.SeedSequence(mode.seed, spawn_key=(index,)))
        points = rng.uniform(lows, highs, size=(size, len(params)))
        return sum(
            all(z in correct for z in _candidate_outputs(tuple(point), x, device, intended))
            for point in points.tolist()
        )

    if mode.workers > 1:
        with ThreadPoolExecutor(max_workers=mode.workers) as pool:
            hits = sum(pool.map(hits_in, chunks))
    else:
        hits = sum(hits_in(chunk) for chunk in chunks)

    fraction = hits / mode.samples
    stderr = volume * math.sqrt(fraction * (1 - fraction) / mode.samples)
    logger.info("monte carlo: %d/%d precise samples for %r", hits, mode.samples, x)

    def membership(error: ErrorVector) -> bool:
        return is_precise_for(error, x, device)

    return PreciseErrorRegion(
        dimension=device.dimension,
        measure=fraction * volume,
        mode="mc",
        mc_samples=mode.samples,
        mc_stderr=stderr,
        membership=membership,
    )


def precise_error_measure(
    x: Any, device: DeviceModel, mode: MeasureMode = Analytic()
) -> PreciseErrorRegion:
    """Measure of the set of errors precise for x.

    Analytic mode treats the region as a coordinate box and multiplies the
    per-coordinate lengths; MonteCarlo mode estimates the hit fraction in a
    bounding box and reports its binomial standard error.
    """
    if isinstance(mode, MonteCarlo):
        return _monte_carlo_region(x, device, mode)
    return _analytic_region(x, device)


def precision_of_measure(measure: float) -> Precision:
    """floor(1 / V), with 1/0 = infinity and 1/infinity = 0."""
    if measure == 0:
        return math.inf
    if math.isinf(measure):
        return 0
    return math.floor(1 / measure)


def precision(x: Any, device: DeviceModel, mode: MeasureMode = Analytic()) -> Precision:
    """Precision required by the device given x."""
    return precision_of_measure(precise_error_measure(x, device, mode).measure)
