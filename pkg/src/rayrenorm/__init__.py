"""External rays and angle combinatorics for disconnected Julia sets."""

from .angles import Angle, sigma, wrap
from .errors import (
    DomainError,
    InsufficientDepth,
    ModelMismatch,
    NoBoundedCritical,
    NoCriticalInCycle,
    NotDisconnected,
    PeriodBudgetExceeded,
    PrecisionError,
    TheoremViolation,
)
from .pmap import (
    Fiber,
    FundamentalArcs,
    LambdaVerdict,
    PMapEntry,
    build_arcs,
    compute_p,
    extend_p,
    fiber_classify,
    level_cover_measure,
    level_holes,
    membership,
    p_preimage,
    rotation_check,
)
from .poly import (
    GreenEstimate,
    Polynomial,
    classify_criticals,
    critical_points,
    escape_radius,
    external_angle,
    green_potential,
)
from .rays import RayTrace, equipotential_component, trace_ray
from .renorm import (
    Renormalization,
    build_geometry,
    build_renormalization,
    membership_numeric,
    verify_p2,
)
from .verify import RunConfig, verify_all

__all__ = [
    "Angle",
    "DomainError",
    "Fiber",
    "FundamentalArcs",
    "GreenEstimate",
    "InsufficientDepth",
    "LambdaVerdict",
    "ModelMismatch",
    "NoBoundedCritical",
    "NoCriticalInCycle",
    "NotDisconnected",
    "PMapEntry",
    "PeriodBudgetExceeded",
    "Polynomial",
    "PrecisionError",
    "RayTrace",
    "Renormalization",
    "RunConfig",
    "TheoremViolation",
    "build_arcs",
    "build_geometry",
    "build_renormalization",
    "classify_criticals",
    "compute_p",
    "critical_points",
    "equipotential_component",
    "escape_radius",
    "extend_p",
    "external_angle",
    "fiber_classify",
    "green_potential",
    "level_cover_measure",
    "level_holes",
    "membership",
    "membership_numeric",
    "p_preimage",
    "rotation_check",
    "sigma",
    "trace_ray",
    "verify_all",
    "verify_p2",
    "wrap",
]
