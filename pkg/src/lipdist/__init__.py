"""Lipschitz distance between finite metric spaces."""

from ._backend import DEFAULT as KERNEL
from .constructions import (
    DiscretizationParams,
    SignVector,
    SignVectorError,
    canonical_interval_map,
    interval_space,
    projection_map,
    pulse_height,
    pulse_space,
    segment_space,
)
from .metric import (
    DistortionReport,
    FiniteMetricSpace,
    MetricAxiomError,
    MetricStructureError,
    PointMap,
    Violation,
    check_metric,
    dilation,
    is_epsilon_isometry,
    lipschitz_cost,
    validate_metric,
)
from .solver import (
    Budget,
    LipschitzResult,
    SeparationReport,
    certify_separation,
    exact_distance,
    local_search_upper_bound,
    naive_distance,
    spectrum_lower_bound,
)

__version__ = "0.1.0"
