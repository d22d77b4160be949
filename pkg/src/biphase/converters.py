"""Linear phase-plate converters acting on three-level biphoton states.

A loss-free plate of optical thickness ``delta`` whose fast axis sits at
angle ``chi`` has single-photon amplitude transmission and reflection

    t = cos(delta) + i sin(delta) cos(2 chi),
    r = i sin(delta) sin(2 chi),

with |t|^2 + |r|^2 = 1.  On the two-photon triple it acts in the Fock
basis through the symmetric-square matrix G(t, r) and in the plate basis
through Q = A G A^-1, where A is the fixed basis change.  At fixed chi the
family Q(delta) forms a one-parameter unitary group whose spectrum is
{exp(2i delta), exp(-2i delta), 1}; a quarter-wave plate (delta = pi/4)
therefore has eigenvalues {i, -i, 1}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .angles import principal
from .errors import (
    BasisMismatchError,
    ConvergenceError,
    NumericError,
    UsageError,
)
from .state_space import BASIS_CHANGE, Basis, Curve, StateVector

#: Allowed deviation of |t|^2 + |r|^2 from one on g_matrix input.
COEFFICIENT_TOL = 1e-9
#: Unitarity tolerance of constructed converter matrices.
UNITARITY_TOL = 1e-10
#: Residual tolerance of the eigen-decomposition.
EIGEN_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class PlateSpec:
    """Phase plate parameters: optical thickness delta, orientation chi."""

    delta: float
    chi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta) and math.isfinite(self.chi)):
            raise UsageError("plate parameters must be finite")


@dataclass(frozen=True)
class TransmissionPair:
    """Amplitude transmission t and reflection r of one plate."""

    t: complex
    r: complex

    @property
    def deviation(self) -> float:
        """How far |t|^2 + |r|^2 sits from one."""
        return abs(abs(self.t) ** 2 + abs(self.r) ** 2 - 1.0)


@dataclass(frozen=True, eq=False)
class Unitary3:
    """3x3 complex matrix tagged with the basis it acts on."""

    matrix: np.ndarray
    basis: Basis

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (3, 3):
            raise UsageError("converter matrices are 3x3")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, state: StateVector) -> StateVector:
        """Act on a state carrying the matching basis tag."""
        if state.basis is not self.basis:
            raise BasisMismatchError(
                f"matrix acts on {self.basis.value} amplitudes, state is {state.basis.value}"
            )
        return StateVector(self.matrix @ state.amplitudes, self.basis)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalue and eigenvector pairs of a converter matrix.

    Pairs are sorted by ascending principal argument of the eigenvalue and
    each eigenvector's global phase is fixed by making its first component
    above 1e-12 in magnitude real and positive.
    """

    pairs: tuple[tuple[complex, StateVector], ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.pairs], dtype=complex)

    @property
    def states(self) -> tuple[StateVector, ...]:
        return tuple(s for _, s in self.pairs)


def plate_coefficients(spec: PlateSpec) -> TransmissionPair:
    """Transmission and reflection amplitudes of a plate."""
    t = complex(math.cos(spec.delta), math.sin(spec.delta) * math.cos(2.0 * spec.chi))
    r = complex(0.0, math.sin(spec.delta) * math.sin(2.0 * spec.chi))
    return TransmissionPair(t, r)


def _g_entries(t, r) -> np.ndarray:
    """Stack of G matrices for broadcastable (t, r), shape (..., 3, 3)."""
    t = np.asarray(t, dtype=complex)
    r = np.asarray(r, dtype=complex)
    t, r = np.broadcast_arrays(t, r)
    tc = np.conj(t)
    rc = np.conj(r)
    s2 = math.sqrt(2.0)
    g = np.empty(t.shape + (3, 3), dtype=complex)
    g[..., 0, 0] = t * t
    g[..., 0, 1] = s2 * t * r
    g[..., 0, 2] = r * r
    g[..., 1, 0] = -s2 * t * rc
    g[..., 1, 1] = t * tc - r * rc
    g[..., 1, 2] = s2 * tc * r
    g[..., 2, 0] = rc * rc
    g[..., 2, 1] = -s2 * tc * rc
    g[..., 2, 2] = tc * tc
    return g


def g_matrix(pair: TransmissionPair) -> Unitary3:
    """Converter matrix on Fock amplitudes.

    The input pair must satisfy |t|^2 + |r|^2 = 1 within ``COEFFICIENT_TOL``;
    the result is then special-unitary (det G = 1) up to rounding.
    """
    if pair.deviation > COEFFICIENT_TOL:
        raise NumericError(
            f"|t|^2 + |r|^2 deviates from 1 by {pair.deviation!r}, not a loss-free plate"
        )
    return Unitary3(_g_entries(pair.t, pair.r), Basis.FOCK)


def q_stack(deltas, chi: float) -> np.ndarray:
    """Q(delta_i, chi) for an array of thickness values, shape (n, 3, 3).

    Computed as the conjugation A G A^T of the Fock-basis form by the fixed
    basis change, which is the normative definition of Q in this package.
    """
    deltas = np.asarray(deltas, dtype=float)
    t = np.cos(deltas) + 1j * np.sin(deltas) * math.cos(2.0 * chi)
    r = 1j * np.sin(deltas) * math.sin(2.0 * chi)
    g = _g_entries(t, r)
    a = BASIS_CHANGE.matrix
    return np.einsum("ib,...bc,lc->...il", a, g, a)


def q_matrix(spec: PlateSpec) -> Unitary3:
    """Converter matrix on plate-basis amplitudes, Q = A G A^-1."""
    return Unitary3(q_stack(np.array([spec.delta]), spec.chi)[0], Basis.PMZ)


def q_matrix_explicit(spec: PlateSpec) -> Unitary3:
    """Closed-form trigonometric entry table for Q, kept as a cross-check.

    This table is retained verbatim as an independent surface to compare
    q_matrix against.  Its (0, 2) entry carries sin(delta) where the
    conjugation product yields sin(2*delta); the two constructions agree in
    every other entry, and ``explicit_entry_mismatch`` measures the single
    deviating one instead of silently reconciling the forms.
    """
    d, x = spec.delta, spec.chi
    c2d = math.cos(2.0 * d)
    s2d = math.sin(2.0 * d)
    c2x = math.cos(2.0 * x)
    s2x = math.sin(2.0 * x)
    c4x = math.cos(4.0 * x)
    s4x = math.sin(4.0 * x)
    cd2 = math.cos(d) ** 2
    sd2 = math.sin(d) ** 2
    q = np.array([
        [c2d, 1j * s2d * c2x, 1j * math.sin(d) * s2x],
        [1j * s2d * c2x, cd2 - sd2 * c4x, -s4x * sd2],
        [1j * s2d * s2x, -s4x * sd2, cd2 + sd2 * c4x],
    ], dtype=complex)
    return Unitary3(q, Basis.PMZ)


def explicit_entry_mismatch(spec: PlateSpec) -> float:
    """Absolute difference between the two Q constructions at entry (0, 2).

    Analytically |sin(2 delta) - sin(delta)| * |sin(2 chi)|; every other
    entry agrees to rounding.
    """
    diff = q_matrix(spec).matrix - q_matrix_explicit(spec).matrix
    return float(abs(diff[0, 2]))


def compose(matrices: Sequence[Unitary3]) -> Unitary3:
    """Product of converter matrices in physical traversal order.

    ``compose([q1, q2, q3])`` returns q3 @ q2 @ q1: the first listed plate
    acts first.  All factors must share one basis tag.
    """
    if not matrices:
        raise UsageError("compose needs at least one matrix")
    basis = matrices[0].basis
    total = np.eye(3, dtype=complex)
    for u in matrices:
        if u.basis is not basis:
            raise BasisMismatchError("compose requires a common basis")
        total = u.matrix @ total
    return Unitary3(total, basis)


def _first_significant(column: np.ndarray) -> int:
    for i, value in enumerate(column):
        if abs(value) > 1e-12:
            return i
    return int(np.argmax(np.abs(column)))


def eigen(u: Unitary3) -> EigenSystem:
    """Eigen-decomposition of a unitary converter matrix.

    Uses a complex Schur factorization, which keeps the eigenvectors
    orthonormal even for degenerate or nearly degenerate spectra.  Raises
    ``NumericError`` when the input is not unitary within ``UNITARITY_TOL``
    and ``ConvergenceError`` when the factorization misses the residual or
    unit-modulus tolerances.
    """
    m = u.matrix
    defect = float(np.max(np.abs(np.conj(m.T) @ m - np.eye(3))))
    if defect > UNITARITY_TOL:
        raise NumericError(f"matrix is not unitary: max |U*U - I| = {defect!r}")
    tri, z = scipy.linalg.schur(m, output="complex")
    values = np.diag(tri).copy()
    if float(np.max(np.abs(np.abs(values) - 1.0))) > UNITARITY_TOL:
        raise ConvergenceError("eigenvalues left the unit circle")
    vectors = np.array(z, dtype=complex)
    for k in range(3):
        col = vectors[:, k]
        lead = col[_first_significant(col)]
        vectors[:, k] = col * (np.conj(lead) / abs(lead))
    residuals = np.linalg.norm(m @ vectors - vectors * values[None, :], axis=0)
    if float(residuals.max()) > EIGEN_RESIDUAL_TOL:
        raise ConvergenceError(f"eigen residual {residuals.max()!r} above tolerance")

    def sort_key(k: int):
        col = vectors[:, k]
        lex = tuple((round(c.real, 12), round(c.imag, 12)) for c in col)
        return (round(principal(cmath.phase(values[k])), 12), lex)

    order = sorted(range(3), key=sort_key)
    pairs = tuple(
        (complex(values[k]), StateVector(vectors[:, k], u.basis)) for k in order
    )
    return EigenSystem(pairs)


def evolve(spec: PlateSpec, state: StateVector, n: int) -> Curve:
    """Curve traced while the plate thickens from zero to ``spec.delta``.

    Samples sit at s_i = delta * i / (n - 1) with the state Q(s_i, chi)
    applied to the input.  A zero-thickness plate yields a constant curve
    on a unit parameter interval, and a negative delta is traversed over
    |delta| with the signed thickness applied, so the parameter grid stays
    strictly increasing in every case.
    """
    if state.basis is not Basis.PMZ:
        raise BasisMismatchError("evolve drives plate-basis amplitudes")
    if n < 2:
        raise UsageError("evolve needs at least 2 samples")
    if spec.delta == 0.0:
        grid = np.linspace(0.0, 1.0, n)
        thickness = np.zeros(n)
    else:
        grid = np.linspace(0.0, abs(spec.delta), n)
        thickness = math.copysign(1.0, spec.delta) * grid
    qs = q_stack(thickness, spec.chi)
    amps = np.einsum("nij,j->ni", qs, state.amplitudes)
    # Zero thickness is the identity analytically; pin the first sample to
    # the input bit-exactly instead of the rounded A A^T product.
    amps[0] = state.amplitudes
    return Curve(grid, amps, Basis.PMZ)
