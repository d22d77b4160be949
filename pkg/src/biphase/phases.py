"""Phase functionals over states and discretized curves.

Three quantities organize everything here.  The Pancharatnam phase of an
ordered pair of non-orthogonal states is arg<A|B>, the phase a two-beam
interferometer locates as its intensity maximum.  The dynamical phase of a
curve is Im integral <psi|dpsi/ds> ds.  Their difference, reduced to the
principal branch, is the geometric phase, which depends only on the ray
trajectory: re-gauging the curve by exp(i alpha(s)) shifts the first two
by alpha(s2) - alpha(s1) and cancels in the difference.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .angles import principal
from .converters import PlateSpec, q_matrix
from .errors import BasisMismatchError, IndeterminatePhaseError, UsageError
from .state_space import Basis, Curve, StateVector, curve_velocity, inner

#: Overlap magnitude below which a relative phase is indeterminate.
ORTHOGONALITY_TOL = 1e-9


@dataclass(frozen=True)
class PhaseReport:
    """Pancharatnam, dynamical, and geometric phase of one curve.

    ``geometric`` always equals the principal-branch reduction of
    ``pancharatnam - dynamical``; construction enforces the identity.
    """

    pancharatnam: float
    dynamical: float
    geometric: float
    visibility: float

    def __post_init__(self) -> None:
        expected = principal(self.pancharatnam - self.dynamical)
        if abs(expected - self.geometric) > 1e-12:
            raise UsageError("geometric phase must equal pancharatnam - dynamical")
        if not -1e-12 <= self.visibility <= 1.0 + 1e-12:
            raise UsageError("visibility must sit in [0, 1]")


def pancharatnam(a: StateVector, b: StateVector, *, threshold: float = ORTHOGONALITY_TOL) -> float:
    """Pancharatnam phase arg<a|b> on the principal branch (-pi, pi]."""
    z = inner(a, b)
    if abs(z) < threshold:
        raise IndeterminatePhaseError(
            f"states are orthogonal within {threshold!r}; relative phase undefined"
        )
    return principal(cmath.phase(z))


def visibility(a: StateVector, b: StateVector) -> float:
    """Interference fringe visibility |<a|b>|, clipped into [0, 1]."""
    return min(1.0, abs(inner(a, b)))


def interference_intensity(a: StateVector, b: StateVector, phi: float) -> float:
    """Two-beam intensity 2 + 2 |<a|b>| cos(phi - arg<a|b>).

    Defined for any pair; orthogonal states simply give the flat value 2.
    The maximum over phi sits at the Pancharatnam phase of (a, b).
    """
    z = inner(a, b)
    return 2.0 + 2.0 * abs(z) * math.cos(phi - cmath.phase(z))


def dynamical_phase_closed_form(state: StateVector, spec: PlateSpec) -> float:
    """Dynamical phase accumulated through a plate, in closed form.

    The integrand Im<psi|dpsi/ddelta> is constant along a plate at fixed
    chi, so the integral collapses to

        delta * Im{2i cos(2 chi) (d1 d2* + d1* d2)
                   + 2i sin(2 chi) (d1 d3* + d1* d3)}

    with (d1, d2, d3) the plate-basis amplitudes of the input state.
    """
    if state.basis is not Basis.PMZ:
        raise BasisMismatchError("closed form needs plate-basis amplitudes")
    d1, d2, d3 = state.amplitudes
    bracket = (
        2j * math.cos(2.0 * spec.chi) * (d1 * np.conj(d2) + np.conj(d1) * d2)
        + 2j * math.sin(2.0 * spec.chi) * (d1 * np.conj(d3) + np.conj(d1) * d3)
    )
    return float(spec.delta * bracket.imag)


def _simpson(y: np.ndarray, x: np.ndarray) -> float:
    """Composite Simpson on a uniform grid with an even interval count.

    Falls back to the trapezoid rule otherwise, which keeps the quadrature
    at or above the O(step^2) accuracy of the finite-difference integrands
    it is fed.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    steps = np.diff(x)
    span = float(x[-1] - x[0])
    uniform = np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12 * max(1.0, abs(span)))
    intervals = x.size - 1
    if uniform and intervals >= 2 and intervals % 2 == 0:
        h = span / intervals
        return float(h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2])))
    return float(np.trapezoid(y, x))


def dynamical_phase_numeric(curve: Curve) -> float:
    """Quadrature estimate of Im integral <psi|dpsi/ds> ds over a curve.

    Velocities come from second-order finite differences, so the estimate
    converges as O(step^2) under refinement of a smooth curve.
    """
    if len(curve) < 3:
        raise UsageError("quadrature needs at least 3 samples")
    vel = curve_velocity(curve)
    integrand = np.einsum("ij,ij->i", np.conj(curve.amplitudes), vel).imag
    return _simpson(integrand, curve.s)


def geometric_phase(curve: Curve, *, threshold: float = ORTHOGONALITY_TOL) -> PhaseReport:
    """Phase decomposition of a curve between its two endpoint states."""
    a = curve.state(0)
    b = curve.state(-1)
    z = inner(a, b)
    if abs(z) < threshold:
        raise IndeterminatePhaseError(
            "endpoint states are orthogonal; the Pancharatnam phase is undefined"
        )
    pan = principal(cmath.phase(z))
    dyn = dynamical_phase_numeric(curve)
    return PhaseReport(
        pancharatnam=pan,
        dynamical=dyn,
        geometric=principal(pan - dyn),
        visibility=min(1.0, abs(z)),
    )


def transformation_phase(
    state: StateVector, spec: PlateSpec, *, threshold: float = ORTHOGONALITY_TOL
) -> tuple[float, float]:
    """Phase acquired under one plate: (arg<d|Q d>, Im<d|Q d>).

    The imaginary part obeys the plate identity

        Im<d|Q d> = sin(2 delta) {cos(2 chi) (d1* d2 + d2* d1)
                                  + sin(2 chi) (d1* d3 + d1 d3*)}.
    """
    if state.basis is not Basis.PMZ:
        raise BasisMismatchError("transformation phase needs plate-basis amplitudes")
    out = q_matrix(spec).matrix @ state.amplitudes
    z = complex(np.vdot(state.amplitudes, out))
    if abs(z) < threshold:
        raise IndeterminatePhaseError("plate output is orthogonal to the input")
    return principal(cmath.phase(z)), z.imag


def vertex_product(
    states: Sequence[StateVector], *, threshold: float = ORTHOGONALITY_TOL
) -> float:
    """Polygon geometric phase -arg{<sN|s1><s1|s2>...<s(N-1)|sN>}.

    The closing overlap <sN|s1> makes the product gauge invariant, so the
    result depends only on the rays of the vertices.  Any overlap below
    ``threshold`` in magnitude is an error: the polygon is then degenerate.
    """
    if len(states) < 2:
        raise UsageError("a vertex product needs at least 2 states")
    basis = states[0].basis
    for st in states[1:]:
        if st.basis is not basis:
            raise BasisMismatchError("vertex states must share one basis")
    total = 0.0
    closing = inner(states[-1], states[0])
    if abs(closing) < threshold:
        raise IndeterminatePhaseError("closing overlap is orthogonal within tolerance")
    total += cmath.phase(closing)
    for left, right in zip(states[:-1], states[1:]):
        z = inner(left, right)
        if abs(z) < threshold:
            raise IndeterminatePhaseError("consecutive vertices are orthogonal within tolerance")
        total += cmath.phase(z)
    return principal(-total)


def bargmann_limit(curve: Curve, *, threshold: float = ORTHOGONALITY_TOL) -> float:
    """Vertex product over all samples of a curve, including the closing leg.

    As the sampling refines, the consecutive overlaps absorb the dynamical
    phase and the value converges to the geometric phase of the curve; on a
    parallel-lifted curve it reduces to -arg<psi(s2)|psi(s1)> directly.
    """
    if len(curve) < 3:
        raise UsageError("the sampled vertex product needs at least 3 samples")
    amps = curve.amplitudes
    consecutive = np.einsum("ij,ij->i", np.conj(amps[:-1]), amps[1:])
    closing = complex(np.vdot(amps[-1], amps[0]))
    if abs(closing) < threshold or float(np.min(np.abs(consecutive))) < threshold:
        raise IndeterminatePhaseError("an overlap in the sampled polygon is orthogonal")
    total = float(np.sum(np.angle(consecutive))) + cmath.phase(closing)
    return principal(-total)
