import enum
from typing import Any, Callable, FrozenSet, Iterable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rescomp.config import settings
from rescomp.errors import PrecisionError

Values = Tuple[float, ...]


class Role(str, enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


class ErrorModel(str, enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class ParameterSpec(BaseModel):
    """A physical input or output parameter and the way errors act on it.

    Attributes:
        name (str): parameter name, e.g. "wavelength".
        role (Role): input or output.
        lower (float): smallest value the parameter may take.
        upper (float): largest value the parameter may take.
        error_model (ErrorModel): additive band [v - e, v + e] or
            multiplicative band [v / e, e * v].
        error_term (float, optional): nominal error term of the parameter.
        error_bound (float, optional): largest error term considered when
            sampling the error space.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    role: Role
    lower: float
    upper: float
    error_model: ErrorModel = ErrorModel.ADDITIVE
    error_term: Optional[float] = None
    error_bound: Optional[float] = None

    @model_validator(mode="after")
    def _check(self) -> "ParameterSpec":
        if self.lower > self.upper:
            raise ValueError(f"empty value interval for {self.name}")
        if self.error_term is not None:
            self.check_error(self.error_term)
        return self

    @property
    def neutral_error(self) -> float:
        return 1.0 if self.error_model is ErrorModel.MULTIPLICATIVE else 0.0

    def check_error(self, error: float) -> None:
        if self.error_model is ErrorModel.MULTIPLICATIVE and not error >= 1.0:
            raise PrecisionError(f"multiplicative error on {self.name} must be >= 1, got {error}")
        if not error >= 0.0:
            raise PrecisionError(f"error on {self.name} must be >= 0, got {error}")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def band(self, value: float, error: float) -> Tuple[float, float]:
        """Values related to `value` under error term `error`, clipped to the interval."""
        self.check_error(error)
        if self.error_model is ErrorModel.ADDITIVE:
            low, high = value - error, value + error
        else:
            if value <= 0:
                raise PrecisionError(f"multiplicative error needs {self.name} > 0")
            low, high = value / error, value * error
        return max(low, self.lower), min(high, self.upper)


class ErrorVector(BaseModel):
    """Error terms of a device, inputs first, then outputs."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[float, ...]

    @field_validator("entries")
    @classmethod
    def _non_negative(cls, entries: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not entry >= 0 for entry in entries):
            raise ValueError("error entries must be non-negative")
        return entries

    @classmethod
    def of(cls, *entries: float) -> "ErrorVector":
        return cls(entries=tuple(float(entry) for entry in entries))

    @classmethod
    def neutral(cls, device: "DeviceModel") -> "ErrorVector":
        return cls(entries=tuple(param.neutral_error for param in device.parameters))

    def __len__(self) -> int:
        return len(self.entries)

    def split(self, device: "DeviceModel") -> Tuple[Values, Values]:
        if len(self.entries) != device.dimension:
            raise PrecisionError(
                f"error vector of length {len(self.entries)} for a device with "
                f"p + q = {device.dimension}"
            )
        p = len(device.input_params)
        return self.entries[:p], self.entries[p:]


class DrawKind(str, enum.Enum):
    EXACT = "exact"
    WORST_CASE = "worst"
    RANDOM = "random"


class Draw(BaseModel):
    """How an implemented or measured value is picked from its error band."""

    model_config = ConfigDict(frozen=True)

    kind: DrawKind = DrawKind.EXACT
    seed: int = Field(0, ge=0)
    endpoint: Literal["low", "high"] = "low"

    @classmethod
    def exact(cls) -> "Draw":
        return cls(kind=DrawKind.EXACT)

    @classmethod
    def worst_case(cls, endpoint: Literal["low", "high"] = "low") -> "Draw":
        return cls(kind=DrawKind.WORST_CASE, endpoint=endpoint)

    @classmethod
    def random(cls, seed: int = 0) -> "Draw":
        return cls(kind=DrawKind.RANDOM, seed=seed)

    def generator(self, stream: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(stream,)))


class Analytic(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["analytic"] = "analytic"


class MonteCarlo(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["mc"] = "mc"
    samples: int = Field(default_factory=lambda: settings.mc_samples, ge=1)
    seed: int = Field(0, ge=0)
    bounds: Optional[Tuple[float, ...]] = None
    workers: int = Field(1, ge=1)
    chunk_size: int = Field(default_factory=lambda: settings.mc_chunk_size, ge=1)


MeasureMode = Union[Analytic, MonteCarlo]

Breakpoints = Callable[[Any, int, float, float], Iterable[float]]


class DeviceModel(BaseModel):
    """A computer seen through its physical input and output parameters.

    Output values returned by `compute` may be longer than the declared
    output parameters; coordinates past the first q are read without error.

    Attributes:
        name (str): device name.
        input_params (tuple): the p input parameters.
        output_params (tuple): the q output parameters.
        encode (Callable): input value x -> intended parameter values.
        compute (Callable): implemented parameter values -> every true output
            value the device can produce from them.
        interpret (Callable): (x, measured output value) -> interpreted output.
        correct_outputs (Callable, optional): x -> set of correct interpreted
            outputs. Without it precision is undecidable.
        input_breakpoints (Callable, optional): (x, index, low, high) -> values
            of input parameter `index` in [low, high] where the interpreted
            output may change. Declaring them makes verdicts exact.
        output_breakpoints (Callable, optional): same for output parameters.
        thresholds (Callable, optional): x -> per-coordinate supremum of the
            precise error terms when the precise region is a coordinate box.
        sample_grid (int): grid points per coordinate for sampled verdicts.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    input_params: Tuple[ParameterSpec, ...]
    output_params: Tuple[ParameterSpec, ...] = ()
    encode: Callable[[Any], Values]
    compute: Callable[[Values], Sequence[Values]]
    interpret: Callable[[Any, Values], Any]
    correct_outputs: Optional[Callable[[Any], FrozenSet[Any]]] = None
    input_breakpoints: Optional[Breakpoints] = None
    output_breakpoints: Optional[Breakpoints] = None
    thresholds: Optional[Callable[[Any], Sequence[float]]] = None
    sample_grid: int = Field(65, ge=2)

    @property
    def parameters(self) -> Tuple[ParameterSpec, ...]:
        return self.input_params + self.output_params

    @property
    def dimension(self) -> int:
        return len(self.input_params) + len(self.output_params)

    @property
    def exact_verdicts(self) -> bool:
        if self.input_params and self.input_breakpoints is None:
            return False
        return not self.output_params or self.output_breakpoints is not None


class PrecisionVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    precise: bool
    sampled: bool = False

    def __bool__(self) -> bool:
        return self.precise


class PreciseErrorRegion(BaseModel):
    """The set of errors precise for one input, summarized by its measure."""

    model_config = ConfigDict(frozen=True)

    dimension: int
    measure: float = Field(ge=0)
    mode: Literal["analytic", "mc"]
    mc_samples: Optional[int] = None
    mc_stderr: Optional[float] = None
    unbounded: bool = False
    thresholds: Optional[Tuple[float, ...]] = None
    membership: Optional[Callable[[ErrorVector], bool]] = Field(default=None, exclude=True)

    def contains(self, error: ErrorVector) -> bool:
        if self.membership is None:
            raise PrecisionError("region carries no membership predicate")
        return self.membership(error)

    def to_json_dict(self) -> dict:
        return self.model_dump(include={"dimension", "measure", "mode", "mc_samples", "mc_stderr"})
