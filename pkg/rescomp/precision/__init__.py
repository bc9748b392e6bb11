from .model import (
    Analytic,
    DeviceModel,
    Draw,
    DrawKind,
    ErrorModel,
    ErrorVector,
    MeasureMode,
    MonteCarlo,
    ParameterSpec,
    PreciseErrorRegion,
    PrecisionVerdict,
    Role,
)
from .region import (
    apply_input_error,
    apply_output_error,
    check_precise,
    coordinate_threshold,
    is_precise_for,
    precise_error_measure,
    precision,
    precision_of_measure,
    yields,
)
