from .geometry import (
    DeviceGeometry,
    Scan,
    SensorMode,
    SensorReading,
    aliasing_risk,
    divisor_readings,
    factor_from_reading,
    grid_points,
    local_minima,
    minimal_readings,
    round_half_up,
    sensor_coord_for_factor,
    sensor_intensity_profile,
    small_divisors,
    wave_activity,
    wave_field,
)
from .device import (
    Bisection,
    Candidate,
    DigitalPre,
    FactorizationOutcome,
    Resources,
    ThresholdMethod,
    corrected_target,
    corrigible_epsilon_threshold,
    digital_bit_ops,
    digital_pre,
    fractional_bits,
    readout_device,
    readout_threshold,
    run_device,
    wavelength_device,
    wavelength_threshold,
)
from .sweep import (
    SweepRow,
    SweepRunner,
    profile_from_rows,
    read_sweep_csv,
    resource_profile,
    sweep,
    sweep_row,
    write_sweep_csv,
)
