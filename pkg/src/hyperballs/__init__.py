"""Balls of the j, hyperbolic, quasihyperbolic and chordal metrics and their inclusions."""

from .balls import (
    JSphereProfile,
    j_ball_bounds,
    j_ball_inscribed,
    j_sphere_curvature,
    j_sphere_profile,
    j_sphere_radial_pair,
    q_ball_conversion,
    q_ball_euclidean,
    q_ball_inside_unit_ball,
    rho_ball_conversion,
    rho_ball_euclidean,
    sample_metric_sphere_2d,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EmptyBoundaryError,
    HyperballsError,
    InternalConsistencyError,
    NoConvergence,
    ValidityError,
)
from .geometry import (
    ConvexPolygon2D,
    EuclideanBall,
    HalfSpace,
    PuncturedSpace,
    UnitBall,
    boundary_distance,
    rectangle,
)
from .metrics import INFINITY, MetricKind, chordal, j_metric, metric_eval, rho_unit_ball
from .quasihyperbolic import qh_distance, qh_length
from .radii import CLAIMS, InclusionBound, inclusion_radii, technical_inequalities, uniform_radii
from .verify import ClaimSpec, VerificationReport, run_claims, verify_inclusion, verify_sharpness

__version__ = "0.1.0"
