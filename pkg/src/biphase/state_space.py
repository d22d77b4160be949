"""Three-level biphoton polarization states and discretized state curves.

A frequency-degenerate collinear biphoton lives in the span of |2,0>, |1,1>
and |0,2>, where (Nx, Ny) counts photons in the two linear polarization
modes.  Two coefficient conventions are used throughout the package:

* ``FOCK``: amplitudes over the photon-number triple (|2,0>, |1,1>, |0,2>),
  the convention the G converter matrices act on;
* ``PMZ``: amplitudes over |Psi+> = (|2,0> + |0,2>)/sqrt(2),
  |Psi-> = (|2,0> - |0,2>)/sqrt(2) and |Psi0> = |1,1>, the convention the
  Q converter matrices act on.

States carry an explicit basis tag so the two conventions can never be
mixed silently.  The fixed change of basis is the real orthogonal matrix

    A = [[1/sqrt2, 0, 1/sqrt2], [1/sqrt2, 0, -1/sqrt2], [0, 1, 0]],

with PMZ amplitudes d = A c and Fock amplitudes c = A^T d.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .errors import BasisMismatchError, NumericError, UsageError

#: Allowed deviation of |c1|^2 + |c2|^2 + |c3|^2 from one.
NORM_TOL = 1e-12


class Basis(enum.Enum):
    """Coefficient convention of a three-level state."""

    FOCK = "fock"
    PMZ = "pmz"


@dataclass(frozen=True, eq=False)
class BasisChange:
    """Real orthogonal matrix taking Fock amplitudes to PMZ amplitudes."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise UsageError("basis change must be a 3x3 real matrix")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def inverse(self) -> np.ndarray:
        # Orthogonal, so the transpose inverts it exactly.
        return self.matrix.T


_S = math.sqrt(0.5)

BASIS_CHANGE = BasisChange(np.array([
    [_S, 0.0, _S],
    [_S, 0.0, -_S],
    [0.0, 1.0, 0.0],
]))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex amplitude triple tagged with its basis.

    Instances are immutable; the amplitude array is copied on construction
    and marked read-only.
    """

    amplitudes: np.ndarray
    basis: Basis

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (3,):
            raise UsageError(f"state needs exactly 3 amplitudes, got shape {amps.shape}")
        if not isinstance(self.basis, Basis):
            raise UsageError(f"basis must be a Basis member, got {self.basis!r}")
        if not np.all(np.isfinite(amps.view(float))):
            raise NumericError("state amplitudes must be finite")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise UsageError(f"state is not unit norm: |c|^2 = {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes, basis: Basis) -> "StateVector":
        """Build a state from an arbitrary nonzero amplitude triple.

        Amplitudes already unit within ``NORM_TOL`` are kept bit-exact so a
        serialized state round-trips without perturbation.
        """
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (3,):
            raise UsageError(f"state needs exactly 3 amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps.view(float))):
            raise NumericError("state amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if norm < 1e-15:
            raise NumericError("cannot normalize a zero amplitude triple")
        if abs(norm * norm - 1.0) > NORM_TOL:
            amps = amps / norm
        return cls(amps, basis)


def _require_same_basis(a: StateVector, b: StateVector) -> None:
    if a.basis is not b.basis:
        raise BasisMismatchError(f"mixed bases: {a.basis.value} vs {b.basis.value}")


def to_pmz(state: StateVector) -> StateVector:
    """Re-express Fock amplitudes in the plate basis (d = A c)."""
    if state.basis is not Basis.FOCK:
        raise BasisMismatchError("to_pmz expects a Fock-basis state")
    return StateVector(BASIS_CHANGE.matrix @ state.amplitudes, Basis.PMZ)


def to_fock(state: StateVector) -> StateVector:
    """Re-express plate-basis amplitudes in the Fock basis (c = A^T d)."""
    if state.basis is not Basis.PMZ:
        raise BasisMismatchError("to_fock expects a plate-basis state")
    return StateVector(BASIS_CHANGE.inverse @ state.amplitudes, Basis.FOCK)


def inner(a: StateVector, b: StateVector) -> complex:
    """Hermitian inner product <a|b>, conjugating the first argument."""
    _require_same_basis(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def ray_distance(a: StateVector, b: StateVector) -> float:
    """Fubini-Study chord sqrt(1 - |<a|b>|^2) between the rays of a and b.

    Gauge invariant: multiplying either state by a unit phase leaves the
    value unchanged.  Rounding can push |<a|b>| a few ulp above one for
    identical rays, so the radicand is clipped at zero.
    """
    overlap = abs(inner(a, b))
    return math.sqrt(max(0.0, 1.0 - overlap * overlap))


@dataclass(frozen=True, eq=False)
class Curve:
    """Discretized one-parameter family of states sharing one basis tag.

    Attributes
    ----------
    s:
        Strictly increasing real parameter samples, shape (n,).
    amplitudes:
        Complex amplitudes, shape (n, 3), one unit-norm row per sample.
    basis:
        Common basis tag of every sample.
    """

    s: np.ndarray
    amplitudes: np.ndarray
    basis: Basis

    def __post_init__(self) -> None:
        s = np.array(self.s, dtype=float)
        amps = np.array(self.amplitudes, dtype=complex)
        if s.ndim != 1 or s.size < 2:
            raise UsageError("a curve needs at least 2 samples")
        if amps.shape != (s.size, 3):
            raise UsageError(f"amplitudes shape {amps.shape} does not match {s.size} samples")
        if not np.all(np.isfinite(s)) or not np.all(np.isfinite(amps.view(float))):
            raise NumericError("curve samples must be finite")
        if not np.all(np.diff(s) > 0.0):
            raise UsageError("curve parameters must be strictly increasing")
        norms = np.sum(np.abs(amps) ** 2, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > NORM_TOL:
            raise UsageError(f"curve contains a non-unit sample, |c|^2 off by {worst!r}")
        if not isinstance(self.basis, Basis):
            raise UsageError(f"basis must be a Basis member, got {self.basis!r}")
        s.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "amplitudes", amps)

    def __len__(self) -> int:
        return int(self.s.size)

    def state(self, index: int) -> StateVector:
        """Sample at ``index`` as a StateVector (negative indices allowed)."""
        return StateVector(self.amplitudes[index], self.basis)

    def samples(self) -> Iterator[tuple[float, StateVector]]:
        for i in range(len(self)):
            yield float(self.s[i]), self.state(i)

    @classmethod
    def from_states(cls, s_values: Sequence[float], states: Sequence[StateVector]) -> "Curve":
        if len(states) != len(s_values):
            raise UsageError("one parameter value per state is required")
        if not states:
            raise UsageError("a curve needs at least 2 samples")
        basis = states[0].basis
        for st in states[1:]:
            if st.basis is not basis:
                raise BasisMismatchError("curve samples must share one basis")
        amps = np.stack([st.amplitudes for st in states])
        return cls(np.asarray(s_values, dtype=float), amps, basis)


def gauge_transform(curve: Curve, alpha: Union[Callable[[float], float], Sequence[float]]) -> Curve:
    """Multiply each sample by exp(i alpha(s)).

    ``alpha`` is either a real function of the curve parameter or a
    precomputed array with one value per sample.  Rays are untouched; only
    the representative phases move.
    """
    if callable(alpha):
        values = np.array([float(alpha(t)) for t in curve.s], dtype=float)
    else:
        values = np.array(alpha, dtype=float)
        if values.shape != curve.s.shape:
            raise UsageError("need exactly one gauge angle per curve sample")
    if not np.all(np.isfinite(values)):
        raise NumericError("gauge angles must be finite at every sample")
    phased = np.exp(1j * values)[:, None] * curve.amplitudes
    return Curve(curve.s, phased, curve.basis)


def curve_velocity(curve: Curve) -> np.ndarray:
    """Finite-difference velocity d(amplitudes)/ds, shape (n, 3).

    Central differences at interior samples and second-order one-sided
    stencils at the ends, so the result is O(step^2) accurate on smooth
    curves.  Needs at least 3 samples.
    """
    if len(curve) < 3:
        raise UsageError("derivatives need at least 3 samples")
    return np.gradient(curve.amplitudes, curve.s, axis=0, edge_order=2)


def overlap_series(curve: Curve) -> np.ndarray:
    """Consecutive overlaps <psi_i|psi_{i+1}>, shape (n-1,)."""
    amps = curve.amplitudes
    return np.einsum("ij,ij->i", np.conj(amps[:-1]), amps[1:])
