import csv
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict

from rescomp.core import ComplexityFunction, ResourceFunction, bit_size, complexity_of
from rescomp.errors import DeviceError, RescompError

from .device import run_device

if TYPE_CHECKING:
    from rescomp.crud import Crud

logger = logging.getLogger("rescomp.factorizer")

SWEEP_HEADER = ["n", "bits", "halvings", "time", "space", "precision", "factor", "verified"]
RESOURCE_NAMES = ("time", "space", "precision")


class SweepRow(BaseModel):
    """One zero-error device run, flattened for CSV and the database."""

    model_config = ConfigDict(frozen=True)

    n: int
    bits: int
    halvings: int
    time: int
    space: int
    precision: Union[int, float]
    factor: Optional[int] = None
    verified: bool = False


def sweep_row(n: int) -> SweepRow:
    outcome = run_device(n)
    factor = outcome.nontrivial_factor
    return SweepRow(
        n=n,
        bits=bit_size(n),
        halvings=outcome.halvings,
        time=outcome.resources.time,
        space=outcome.resources.space,
        precision=outcome.resources.precision,
        factor=factor,
        verified=factor is not None,
    )


class SweepRunner:
    """Runs the device over a range of n in a background thread.

    Rows are merged by n, so the result does not depend on the number of
    workers. With a Crud the rows are stored under `run_label` once the sweep
    has finished.
    """

    def __init__(
        self,
        n_values: Iterable[int],
        crud: Optional["Crud"] = None,
        run_label: str = "sweep",
        workers: int = 1,
    ):
        if workers < 1:
            raise DeviceError("workers must be >= 1")
        self._n_values = sorted(set(n_values))
        self._crud = crud
        self._run_label = run_label
        self._workers = workers
        self._rows: Dict[int, SweepRow] = {}
        self._lock = threading.Lock()
        self._error: Optional[BaseException] = None
        self._thread: Optional[threading.Thread] = None
        self._stopped = threading.Event()

    def start(self) -> None:
        self._stopped.clear()
        self._thread = threading.Thread(target=self._run, name=f"sweep-{self._run_label}")
        self._thread.start()

    def stop(self) -> None:
        self._stopped.set()
        self.join()

    def join(self) -> None:
        thread = self._thread
        self._thread = None
        if thread is not None:
            thread.join()
        if self._error is not None:
            error, self._error = self._error, None
            raise error

    def run(self) -> List[SweepRow]:
        self.start()
        self.join()
        return self.rows

    @property
    def rows(self) -> List[SweepRow]:
        with self._lock:
            return [self._rows[n] for n in sorted(self._rows)]

    def _collect(self, row: SweepRow) -> None:
        with self._lock:
            self._rows[row.n] = row
            count = len(self._rows)
        if count % 100 == 0:
            logger.info("swept %d of %d values", count, len(self._n_values))

    def _run(self) -> None:
        try:
            if self._workers > 1:
                with ThreadPoolExecutor(max_workers=self._workers) as pool:
                    for row in pool.map(self._row_unless_stopped, self._n_values):
                        if row is not None:
                            self._collect(row)
            else:
                for n in self._n_values:
                    if self._stopped.is_set():
                        break
                    self._collect(sweep_row(n))
            if self._stopped.is_set():
                logger.info("sweep %s stopped after %d rows", self._run_label, len(self._rows))
                return
            if self._crud is not None:
                try:
                    self._crud.add_sweep_rows(self._run_label, self.rows)
                except self._crud.IntegrityError:
                    logger.error("sweep %s already stored", self._run_label)
                    raise
        except BaseException as error:  # re-raised by join() on the caller's thread
            self._error = error

    def _row_unless_stopped(self, n: int) -> Optional[SweepRow]:
        if self._stopped.is_set():
            return None
        return sweep_row(n)


def sweep(n_values: Iterable[int], workers: int = 1) -> List[SweepRow]:
    """Zero-error device runs over n_values, one row per distinct n, ascending."""
    return SweepRunner(n_values, workers=workers).run()


def _format_precision(value: Union[int, float]) -> str:
    return "inf" if value == math.inf else str(value)


def _parse_precision(text: str) -> Union[int, float]:
    return math.inf if text == "inf" else int(text)


def write_sweep_csv(rows: Iterable[SweepRow], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.n,
                row.bits,
                row.halvings,
                row.time,
                row.space,
                _format_precision(row.precision),
                "" if row.factor is None else row.factor,
                "true" if row.verified else "false",
            ]
        )


def read_sweep_csv(stream) -> List[SweepRow]:
    """Parse a sweep CSV.

    Raises:
        DeviceError: wrong header or malformed row.
    """
    reader = csv.DictReader(stream)
    if reader.fieldnames != SWEEP_HEADER:
        raise DeviceError(f"expected header {','.join(SWEEP_HEADER)}")
    rows = []
    for line, record in enumerate(reader, start=2):
        try:
            rows.append(
                SweepRow(
                    n=int(record["n"]),
                    bits=int(record["bits"]),
                    halvings=int(record["halvings"]),
                    time=int(record["time"]),
                    space=int(record["space"]),
                    precision=_parse_precision(record["precision"]),
                    factor=int(record["factor"]) if record["factor"] else None,
                    verified=record["verified"] == "true",
                )
            )
        except (TypeError, ValueError) as error:
            raise DeviceError(f"malformed sweep row on line {line}: {error}") from error
    return rows


def profile_from_rows(rows: Sequence[SweepRow]) -> Dict[str, ComplexityFunction]:
    """Complexity functions over bit sizes for every resource column of a sweep."""
    if not rows:
        raise DeviceError("empty sweep")
    return {
        name: complexity_of(
            ResourceFunction(name=name, evaluate=lambda row, name=name: getattr(row, name)),
            lambda row: row.bits,
            rows,
        )
        for name in RESOURCE_NAMES
    }


def resource_profile(n_values: Sequence[int]) -> Dict[str, ComplexityFunction]:
    """Time, space and precision complexity functions of the device over odd n.

    Raises:
        DeviceError: some n is not an odd number >= 3.
    """
    bad = [n for n in n_values if n < 3 or n % 2 == 0]
    if bad:
        raise DeviceError(f"resource profile needs odd n >= 3, got {bad[:5]}")
    try:
        rows = sweep(n_values)
    except RescompError:
        logger.error("resource profile failed over %d values", len(n_values))
        raise
    return profile_from_rows(rows)
