"""Phases of three-level biphoton polarization states under phase plates.

The package models states spanned by three two-photon polarization modes,
the unitary matrices a linear phase plate induces on them, and the
Pancharatnam, dynamical, and geometric phases their evolutions pick up,
together with Hilbert-space geodesics, parallel lifts, and discretized
polygon (vertex) phase products.
"""

from .angles import TWO_PI, angle_distance, principal
from .converters import (
    EigenSystem,
    PlateSpec,
    TransmissionPair,
    Unitary3,
    compose,
    eigen,
    evolve,
    explicit_entry_mismatch,
    g_matrix,
    plate_coefficients,
    q_matrix,
    q_matrix_explicit,
    q_stack,
)
from .errors import (
    BasisMismatchError,
    BiphaseError,
    ConfigError,
    ConvergenceError,
    DegenerateRayError,
    IndeterminatePhaseError,
    NumericError,
    UsageError,
)
from .geodesics import (
    GeodesicScenario,
    curve_length,
    detect_phase_jump,
    generalized_geodesic_check,
    geodesic_between,
    geodesic_frame,
    geodesic_residual,
    horizontality_residual,
    parallel_lift,
    two_level_curve,
    two_level_fringe,
    two_level_scenario,
)
from .phases import (
    ORTHOGONALITY_TOL,
    PhaseReport,
    bargmann_limit,
    dynamical_phase_closed_form,
    dynamical_phase_numeric,
    geometric_phase,
    interference_intensity,
    pancharatnam,
    transformation_phase,
    vertex_product,
    visibility,
)
from .state_space import (
    BASIS_CHANGE,
    Basis,
    BasisChange,
    Curve,
    StateVector,
    curve_velocity,
    gauge_transform,
    inner,
    overlap_series,
    ray_distance,
    to_fock,
    to_pmz,
)

__version__ = "0.1.0"

__all__ = [
    "TWO_PI",
    "angle_distance",
    "principal",
    "EigenSystem",
    "PlateSpec",
    "TransmissionPair",
    "Unitary3",
    "compose",
    "eigen",
    "evolve",
    "explicit_entry_mismatch",
    "g_matrix",
    "plate_coefficients",
    "q_matrix",
    "q_matrix_explicit",
    "q_stack",
    "BiphaseError",
    "UsageError",
    "BasisMismatchError",
    "NumericError",
    "IndeterminatePhaseError",
    "DegenerateRayError",
    "ConvergenceError",
    "ConfigError",
    "GeodesicScenario",
    "curve_length",
    "detect_phase_jump",
    "generalized_geodesic_check",
    "geodesic_between",
    "geodesic_frame",
    "geodesic_residual",
    "horizontality_residual",
    "parallel_lift",
    "two_level_curve",
    "two_level_fringe",
    "two_level_scenario",
    "ORTHOGONALITY_TOL",
    "PhaseReport",
    "bargmann_limit",
    "dynamical_phase_closed_form",
    "dynamical_phase_numeric",
    "geometric_phase",
    "interference_intensity",
    "pancharatnam",
    "transformation_phase",
    "vertex_product",
    "visibility",
    "BASIS_CHANGE",
    "Basis",
    "BasisChange",
    "Curve",
    "StateVector",
    "curve_velocity",
    "gauge_transform",
    "inner",
    "overlap_series",
    "ray_distance",
    "to_fock",
    "to_pmz",
    "__version__",
]
