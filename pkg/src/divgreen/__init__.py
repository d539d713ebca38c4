"""Numerical verification of generalized Gauss-Green formulas in the plane.

Builds sets of finite perimeter from CSG primitives, evaluates finitely
additive limit measures (densities, smeared boundary measures, normal
measures), checks Gauss formulas for bounded and unbounded
divergence-measure vector fields by independent routes, and certifies the
classic counterexamples (tangential blow-up, boundary point sources,
vortex fields whose trace needs a gradient-acting pure part).
"""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    Arc,
    BoundaryCurve,
    Box,
    Difference,
    Disk,
    EmptyRegion,
    GeometryError,
    HalfPlane,
    Intersection,
    Offset,
    PointClass,
    Region,
    Segment,
    Union,
    classify_point,
    locate,
    neighborhood,
    perimeter,
    reduced_boundary,
    region_from_json,
    region_to_json,
    shell_area,
)
from .quadrature import (  # noqa: F401
    DEFAULT_SCHEDULE,
    LimitResult,
    QuadResult,
    ScaleSchedule,
    integrate_curve,
    integrate_region,
    limit_extrapolate,
)
from .measures import (  # noqa: F401
    AuraCertificate,
    LimitMeasure,
    SimpleFunction,
    aura_check,
    converges_in_measure,
    core_estimate,
    daniell_integrate,
    density_measure,
    eval_measure,
    outer_measure,
    smear_radon,
    tv_lower_bound,
)
from .fields import (  # noqa: F401
    DivergenceMeasure,
    DMField,
    divergence_of,
    dm_norm,
    fixture,
    verify_weak_divergence,
)
from .normal import (  # noqa: F401
    GaussReport,
    NormalApproximation,
    gauss_bv_scalar,
    gauss_check_bounded,
    make_approximation,
    nonintegrability_witness,
    normal_measure_boundary,
    normal_measure_shell,
    normal_trace_bounded,
    tv_lowerbound_check,
)
from .traces import (  # noqa: F401
    LipschitzEstimate,
    TraceValue,
    ball_cover,
    lipschitz_bound,
    pure_part_detector,
    shell_gradient_limit,
    silhavy_trace,
    strip_gradient_series,
)
