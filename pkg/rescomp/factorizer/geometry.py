import logging
import math
from typing import Dict, List, Literal, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from rescomp.errors import DeviceError
from rescomp.precision import Analytic

logger = logging.getLogger("rescomp.factorizer")

Point = Tuple[float, float, float]

MINIMUM_BRIGHTNESS_CUTOFF = 0.5

MIRRORS = {
    "M1": "parabola y = -x^2/2 + x + 1",
    "M2": "line y = x",
    "M3": "line x = 0",
}


class Scan(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["scan"] = "scan"
    resolution: int = Field(ge=2)


SensorMode = Union[Analytic, Scan]


def round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def small_divisors(m: int) -> List[int]:
    """Divisors a of m with a * a <= m, ascending."""
    return [a for a in range(1, math.isqrt(m) + 1) if m % a == 0]


class DeviceGeometry(BaseModel):
    """Placement of the apparatus set up to factorize n.

    The mirrors are kept as documentation only: the wave field is replaced by
    a surrogate with the same maxima.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    source_position: Point = (1.0, 1.0, 0.0)
    mirror_specs: Dict[str, str] = Field(default_factory=lambda: dict(MIRRORS))

    @field_validator("n")
    @classmethod
    def _odd(cls, n: int) -> int:
        if n < 3 or n % 2 == 0:
            raise ValueError("device geometry defined for odd n >= 3")
        return n

    @property
    def wavelength(self) -> float:
        return 2 / self.n

    @property
    def vertex_height(self) -> float:
        return math.sqrt(2 / self.n)

    @property
    def vertex(self) -> Point:
        return (0.0, 0.0, self.vertex_height)

    @property
    def abstract_cone_vertex(self) -> Point:
        """Cone vertex before scaling; the cone has axis {(t, t, sqrt(2n))} and half-angle pi/4."""
        return (0.0, 0.0, math.sqrt(2 * self.n))

    def scale(self, point: Point) -> Point:
        x, y, z = point
        return (x / self.n, y / self.n, z / self.n)

    def surface_point(self, c: float) -> Tuple[float, float]:
        """Grid-plane point whose ray from the vertex meets the plane x + y = 2 at x = c."""
        t = math.sqrt(self.n * c * (2 - c))
        return (c / t, (2 - c) / t)

    def arc_height(self, c: float) -> float:
        """z-coordinate of the sensor arc point with x-coordinate c."""
        return self.vertex_height * (1 - math.sqrt(self.n * c * (2 - c)))

    def arc_residual(self, c: float) -> float:
        return 2 * (c - 1) ** 2 + (self.arc_height(c) - self.vertex_height) ** 2 - 2


class SensorReading(BaseModel):
    model_config = ConfigDict(frozen=True)

    c: float = Field(gt=0, le=1)
    brightness: float = Field(ge=0, le=1)


def grid_points(n: int) -> Set[Tuple[int, int]]:
    """Points (a, b) with 0 <= a <= b <= n and a - b even.

    Raises:
        DeviceError: n is even or smaller than 1.
    """
    if n < 1 or n % 2 == 0:
        raise DeviceError("grid defined for odd n")
    return {(a, b) for a in range(n + 1) for b in range(a, n + 1, 2)}


def wave_activity(x: float, y: float, n: int) -> float:
    """Surrogate standing-wave activity |cos(pi n x) + cos(pi n y)|.

    Equals 2 exactly where n x and n y are integers of the same parity.

    Raises:
        DeviceError: the point lies outside 0 <= x <= y <= 1.
    """
    if not 0 <= x <= y <= 1:
        raise DeviceError(f"point ({x}, {y}) outside 0 <= x <= y <= 1")
    return abs(math.cos(math.pi * n * x) + math.cos(math.pi * n * y))


def wave_field(xs: np.ndarray, ys: np.ndarray, n: int) -> np.ndarray:
    """Vectorized wave_activity; points outside the region have activity 0."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    inside = (xs >= 0) & (xs <= ys) & (ys <= 1)
    activity = np.abs(np.cos(np.pi * n * xs) + np.cos(np.pi * n * ys))
    return np.where(inside, activity, 0.0)


def sensor_coord_for_factor(a: int, n: int) -> float:
    """Sensor x-coordinate c = 2a^2 / (n + a^2) at which divisor a shows up.

    Raises:
        DeviceError: a < 1 or a > sqrt(n).
    """
    if a < 1:
        raise DeviceError("divisor candidate must be >= 1")
    if a * a > n:
        raise DeviceError("beyond arc constraint 2 - x >= 1")
    return 2 * a * a / (n + a * a)


def factor_from_reading(c: float, n: int) -> int:
    """Nearest integer to sqrt(n c / (2 - c))."""
    if not 0 < c <= 1:
        raise DeviceError(f"sensor coordinate {c} outside (0, 1]")
    return round_half_up(math.sqrt(n * c / (2 - c)))


def divisor_readings(m: int) -> List[SensorReading]:
    return [
        SensorReading(c=sensor_coord_for_factor(a, m), brightness=0.0) for a in small_divisors(m)
    ]


def aliasing_risk(n: int, resolution: int) -> bool:
    return resolution < 2 * n


def _scan(n: int, resolution: int) -> List[SensorReading]:
    if aliasing_risk(n, resolution):
        logger.warning("aliasing risk: %d samples for n = %d", resolution, n)
    cs = np.arange(1, resolution + 1, dtype=float) / resolution
    t = np.sqrt(n * cs * (2 - cs))
    activity = wave_field(cs / t, (2 - cs) / t, n)
    brightness = np.clip(1 - activity / 2, 0.0, 1.0)
    return [SensorReading(c=c, brightness=b) for c, b in zip(cs.tolist(), brightness.tolist())]


def sensor_intensity_profile(n: int, mode: SensorMode = Analytic()) -> List[SensorReading]:
    """Readings along the sensor arc of the device set up for n.

    Analytic mode gives one zero-brightness reading per divisor a <= sqrt(n);
    Scan mode samples c uniformly on (0, 1] with brightness 1 - W / 2.

    Raises:
        DeviceError: n is not an odd number >= 3.
    """
    if n < 3 or n % 2 == 0:
        raise DeviceError("sensor profile defined for odd n >= 3")
    if isinstance(mode, Scan):
        return _scan(n, mode.resolution)
    return divisor_readings(n)


def local_minima(readings: List[SensorReading]) -> List[SensorReading]:
    """Local minima of a scanned profile darker than the cutoff."""
    minima = []
    last = len(readings) - 1
    for i, reading in enumerate(readings):
        if reading.brightness >= MINIMUM_BRIGHTNESS_CUTOFF:
            continue
        left = readings[i - 1].brightness if i > 0 else math.inf
        right = readings[i + 1].brightness if i < last else math.inf
        if reading.brightness <= left and reading.brightness < right:
            minima.append(reading)
    return minima


def minimal_readings(n: int, mode: SensorMode = Analytic()) -> List[SensorReading]:
    if isinstance(mode, Scan):
        return local_minima(sensor_intensity_profile(n, mode))
    return sensor_intensity_profile(n, mode)
