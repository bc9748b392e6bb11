import logging

import numpy as np
import pytest
from pydantic import ValidationError

from rescomp.errors import DeviceError
from rescomp.factorizer import (
    DeviceGeometry,
    Scan,
    SensorReading,
    factor_from_reading,
    grid_points,
    local_minima,
    minimal_readings,
    sensor_coord_for_factor,
    sensor_intensity_profile,
    small_divisors,
    wave_activity,
    wave_field,
)


def test_grid_law():
    for n in range(1, 100, 2):
        assert len(grid_points(n)) == (n * n + 4 * n + 3) // 4


def test_grid_examples():
    assert grid_points(3) == {(0, 0), (0, 2), (1, 1), (1, 3), (2, 2), (3, 3)}
    assert grid_points(1) == {(0, 0), (1, 1)}
    assert len(grid_points(5)) == 12
    with pytest.raises(DeviceError, match="grid defined for odd n"):
        grid_points(4)


def test_wave_activity_examples():
    assert wave_activity(0.2, 0.6, 5) == pytest.approx(2.0)
    assert wave_activity(0.2, 0.4, 5) == pytest.approx(0.0, abs=1e-12)
    assert wave_activity(0.1, 0.3, 5) < 2
    with pytest.raises(DeviceError):
        wave_activity(0.5, 0.2, 5)


@pytest.mark.parametrize("n", [1, 3, 5, 15, 21, 99])
def test_wave_activity_is_maximal_on_the_grid(n):
    for a, b in grid_points(n):
        assert wave_activity(a / n, b / n, n) == pytest.approx(2.0, abs=1e-9)


def test_wave_activity_below_maximum_off_the_grid():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 10_000:
        n = int(rng.choice([3, 5, 7, 15, 35]))
        x, y = sorted(rng.uniform(0, 1, size=2))
        nx, ny = n * x, n * y
        if min(abs(nx - round(nx)), abs(ny - round(ny))) < 1e-6:
            continue
        assert wave_activity(x, y, n) < 2
        checked += 1


def test_wave_field_matches_pointwise():
    xs = np.array([0.2, 0.1, 0.7])
    ys = np.array([0.6, 0.3, 0.2])
    field = wave_field(xs, ys, 5)
    assert field[0] == pytest.approx(wave_activity(0.2, 0.6, 5))
    assert field[1] == pytest.approx(wave_activity(0.1, 0.3, 5))
    assert field[2] == 0.0


def test_sensor_coordinate_examples():
    assert sensor_coord_for_factor(3, 15) == pytest.approx(0.75)
    assert sensor_coord_for_factor(1, 3) == pytest.approx(0.5)
    assert sensor_coord_for_factor(3, 9) == pytest.approx(1.0)
    with pytest.raises(DeviceError, match="beyond arc constraint"):
        sensor_coord_for_factor(5, 15)
    with pytest.raises(DeviceError):
        sensor_coord_for_factor(0, 15)


def test_sensor_coordinate_is_the_ray_plane_intersection():
    n, a = 15, 3
    geometry = DeviceGeometry(n=n)
    vx, vy, vz = geometry.vertex
    px, py = a / n, 1 / a
    # ray vertex + t * (p - vertex) meets x + y = 2
    t = 2 / (px + py)
    assert vx + t * (px - vx) == pytest.approx(sensor_coord_for_factor(a, n))
    assert geometry.surface_point(sensor_coord_for_factor(a, n)) == pytest.approx((px, py))


def test_factor_from_reading_examples():
    assert factor_from_reading(0.75, 15) == 3
    assert factor_from_reading(0.5, 3) == 1
    assert factor_from_reading(0.76, 15) == 3
    with pytest.raises(DeviceError):
        factor_from_reading(0.0, 15)
    with pytest.raises(DeviceError):
        factor_from_reading(1.5, 15)


def test_sensor_round_trip_and_arc():
    for n in range(9, 1000, 2):
        divisors = small_divisors(n)
        if len(divisors) < 2:
            continue
        geometry = DeviceGeometry(n=n)
        for a in divisors:
            c = sensor_coord_for_factor(a, n)
            assert factor_from_reading(c, n) == a
            assert abs(geometry.arc_residual(c)) < 1e-12


def test_device_geometry():
    geometry = DeviceGeometry(n=15)
    assert geometry.wavelength == 2 / 15
    assert geometry.vertex_height**2 == pytest.approx(2 / 15, rel=1e-15)
    assert geometry.scale(geometry.abstract_cone_vertex) == pytest.approx(geometry.vertex)
    assert set(geometry.mirror_specs) == {"M1", "M2", "M3"}
    with pytest.raises(ValidationError):
        DeviceGeometry(n=16)


@pytest.mark.parametrize(
    "n, expected",
    [(15, [2 / 16, 0.75]), (7, [0.25]), (25, [2 / 26, 1.0])],
)
def test_analytic_profile(n, expected):
    readings = sensor_intensity_profile(n)
    assert [r.c for r in readings] == pytest.approx(expected)
    assert all(r.brightness == 0 for r in readings)


def test_profile_needs_odd_n():
    with pytest.raises(DeviceError):
        sensor_intensity_profile(16)
    with pytest.raises(DeviceError):
        sensor_intensity_profile(1)


def test_scan_finds_divisor_minima():
    minima = minimal_readings(15, Scan(resolution=2000))
    coordinates = {round(r.c, 9) for r in minima}
    assert {0.125, 0.75} <= coordinates
    assert all(r.brightness < 0.5 for r in minima)


def test_scan_warns_about_aliasing(caplog):
    with caplog.at_level(logging.WARNING, logger="rescomp.factorizer"):
        sensor_intensity_profile(15, Scan(resolution=20))
    assert "aliasing risk" in caplog.text


def test_local_minima():
    readings = [
        SensorReading(c=c, brightness=b)
        for c, b in [(0.2, 0.9), (0.4, 0.1), (0.6, 0.7), (0.8, 0.6), (1.0, 0.55)]
    ]
    assert [r.c for r in local_minima(readings)] == [0.4]
