import io
import math

import pytest

from rescomp.core import GrowthClass
from rescomp.errors import DeviceError
from rescomp.factorizer import (
    SweepRow,
    SweepRunner,
    profile_from_rows,
    read_sweep_csv,
    sweep,
    write_sweep_csv,
)


def test_sweep_rows_are_merged_by_n():
    rows = sweep([15, 9, 7, 15])
    assert [row.n for row in rows] == [7, 9, 15]
    fifteen = rows[-1]
    assert fifteen.bits == 4
    assert fifteen.factor == 3 and fifteen.verified
    assert rows[0].factor is None and not rows[0].verified


def test_sweep_is_independent_of_workers():
    assert sweep(range(3, 401, 2), workers=4) == sweep(range(3, 401, 2), workers=1)


def test_sweep_csv():
    rows = sweep([6, 15])
    stream = io.StringIO()
    write_sweep_csv(rows, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == "n,bits,halvings,time,space,precision,factor,verified"
    assert lines[1] == f"6,3,1,{rows[0].time},1,10,,false"
    stream.seek(0)
    assert read_sweep_csv(stream) == rows


def test_sweep_csv_infinite_precision():
    row = SweepRow(n=3, bits=2, halvings=0, time=1, space=1, precision=math.inf)
    stream = io.StringIO()
    write_sweep_csv([row], stream)
    assert stream.getvalue().splitlines()[1] == "3,2,0,1,1,inf,,false"
    stream.seek(0)
    assert read_sweep_csv(stream)[0].precision == math.inf


def test_read_sweep_csv_errors():
    with pytest.raises(DeviceError, match="expected header"):
        read_sweep_csv(io.StringIO("n,bits\n3,2\n"))
    bad = "n,bits,halvings,time,space,precision,factor,verified\n3,two,0,1,1,10,,false\n"
    with pytest.raises(DeviceError, match="line 2"):
        read_sweep_csv(io.StringIO(bad))


def test_profile_from_rows():
    profile = profile_from_rows(sweep(range(3, 256, 2)))
    assert set(profile) == {"time", "space", "precision"}
    assert profile["precision"].growth == GrowthClass.exponential()
    assert profile["precision"][8] == math.floor(255 * 255.5)
    with pytest.raises(DeviceError):
        profile_from_rows([])


def test_runner_stores_rows(crud_in_memory):
    runner = SweepRunner(range(3, 120, 2), crud=crud_in_memory, run_label="odd", workers=2)
    rows = runner.run()
    assert crud_in_memory.get_sweep_rows("odd") == rows


def test_runner_rejects_duplicate_label(crud_in_memory):
    SweepRunner([3, 5, 7], crud=crud_in_memory, run_label="again").run()
    with pytest.raises(crud_in_memory.IntegrityError):
        SweepRunner([3, 5], crud=crud_in_memory, run_label="again").run()


def test_runner_surfaces_device_errors():
    with pytest.raises(DeviceError, match="n < 2"):
        SweepRunner([1, 3]).run()
    with pytest.raises(DeviceError):
        SweepRunner([3], workers=0)
