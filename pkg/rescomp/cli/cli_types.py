from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class GlobalOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(0, ge=0)
    json_output: bool = False
    verbose: bool = False


class Factorize(GlobalOptions):
    command: Literal["factorize"] = "factorize"
    n: int
    epsilon_lambda: float = 0.0
    epsilon_c: float = 0.0
    draw: Literal["exact", "worst", "random"] = "exact"


class Sweep(GlobalOptions):
    command: Literal["sweep"] = "sweep"
    n_from: int
    n_to: int
    step: int = Field(2, ge=1)
    out_path: str = Field(min_length=1)
    format: Literal["csv", "json"] = "csv"
    workers: int = Field(1, ge=1)
    db: Optional[str] = None


class Analyze(GlobalOptions):
    command: Literal["analyze"] = "analyze"
    sweep_csv_path: str = Field(min_length=1)


class Protocol(GlobalOptions):
    command: Literal["protocol"] = "protocol"
    modulus_bits: int
    message: int
    out_path: str = Field(min_length=1)
    db: Optional[str] = None


Command = Union[Factorize, Sweep, Analyze, Protocol]


class ExitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    exit_code: Literal[0, 1, 2]
    summary: str
