from .growth import GrowthClass, GrowthKind, classify_growth, growth_leq
from .complexity import (
    ComplexityFunction,
    ResourceFunction,
    ResourceSample,
    bit_size,
    complexity_of,
    dominant_resources,
    normalize,
    overall_complexity,
    read_complexity_csv,
    sample_resource,
    write_complexity_csv,
)
