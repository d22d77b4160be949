import cmath
import math

import numpy as np
import pytest

from biphase import (
    Basis,
    BasisMismatchError,
    ConvergenceError,
    NumericError,
    PlateSpec,
    StateVector,
    TransmissionPair,
    Unitary3,
    UsageError,
    compose,
    eigen,
    evolve,
    explicit_entry_mismatch,
    g_matrix,
    plate_coefficients,
    principal,
    q_matrix,
    q_matrix_explicit,
    q_stack,
)
from conftest import random_state

S = math.sqrt(0.5)


def random_spec(rng) -> PlateSpec:
    return PlateSpec(
        delta=float(rng.uniform(-2.0 * math.pi, 2.0 * math.pi)),
        chi=float(rng.uniform(-math.pi, math.pi)),
    )


def test_plate_spec_rejects_non_finite_parameters():
    with pytest.raises(UsageError):
        PlateSpec(math.nan, 0.0)
    with pytest.raises(UsageError):
        PlateSpec(0.0, math.inf)


def test_plate_coefficients_frozen_point():
    pair = plate_coefficients(PlateSpec(math.pi / 3.0, math.pi / 12.0))
    assert pair.t == pytest.approx(0.5 + 0.75j, abs=1e-15)
    assert pair.r == pytest.approx(0.4330127018922193j, abs=1e-15)
    assert pair.deviation < 1e-15


def test_plate_coefficients_are_lossless_everywhere(rng):
    for _ in range(200):
        assert plate_coefficients(random_spec(rng)).deviation < 1e-14


def test_half_wave_plate_g_matrix():
    pair = plate_coefficients(PlateSpec(math.pi / 2.0, math.pi / 4.0))
    g = g_matrix(pair).matrix
    expected = np.array([[0, 0, -1], [0, -1, 0], [-1, 0, 0]], dtype=complex)
    assert np.max(np.abs(g - expected)) < 1e-15


def entrywise_g(t: complex, r: complex) -> np.ndarray:
    # independent transcription of the nine entries, scalar cmath only
    s2 = math.sqrt(2.0)
    tc, rc = t.conjugate(), r.conjugate()
    return np.array(
        [
            [t * t, s2 * t * r, r * r],
            [-s2 * t * rc, t * tc - r * rc, s2 * tc * r],
            [rc * rc, -s2 * tc * rc, tc * tc],
        ]
    )


def test_g_matrix_matches_scalar_transcription(rng):
    for _ in range(50):
        pair = plate_coefficients(random_spec(rng))
        got = g_matrix(pair).matrix
        assert np.max(np.abs(got - entrywise_g(pair.t, pair.r))) < 1e-15


def test_g_matrix_is_special_unitary(rng):
    for _ in range(200):
        g = g_matrix(plate_coefficients(random_spec(rng))).matrix
        assert np.max(np.abs(np.conj(g.T) @ g - np.eye(3))) < 1e-12
        assert abs(np.linalg.det(g) - 1.0) < 1e-12


def test_zero_thickness_g_is_the_identity():
    g = g_matrix(plate_coefficients(PlateSpec(0.0, 0.7))).matrix
    assert np.array_equal(g, np.eye(3, dtype=complex))


def test_g_matrix_rejects_lossy_coefficients():
    lossy = TransmissionPair(1.0 + 0.0j, 0.1j)
    assert lossy.deviation == pytest.approx(0.01)
    with pytest.raises(NumericError):
        g_matrix(lossy)


def test_g_matrix_acts_on_fock_amplitudes():
    g = g_matrix(plate_coefficients(PlateSpec(0.4, 0.1)))
    assert g.basis is Basis.FOCK
    with pytest.raises(BasisMismatchError):
        g.apply(StateVector(np.array([1.0, 0.0, 0.0], dtype=complex), Basis.PMZ))


def test_quarter_wave_plate_q_matrix():
    q = q_matrix(PlateSpec(math.pi / 4.0, 0.0)).matrix
    expected = np.array([[0, 1j, 0], [1j, 0, 0], [0, 0, 1]], dtype=complex)
    assert np.max(np.abs(q - expected)) < 1e-12


def test_half_wave_plate_q_matrix_is_diagonal():
    q = q_matrix(PlateSpec(math.pi / 2.0, math.pi / 4.0)).matrix
    assert np.max(np.abs(q - np.diag([-1.0, 1.0, -1.0]))) < 1e-12


def symmetric_table(delta: float, chi: float) -> np.ndarray:
    """Hand-derived trigonometric form of Q, symmetric with real diagonal."""
    c2d, s2d = math.cos(2 * delta), math.sin(2 * delta)
    c2x, s2x = math.cos(2 * chi), math.sin(2 * chi)
    c4x, s4x = math.cos(4 * chi), math.sin(4 * chi)
    cd2, sd2 = math.cos(delta) ** 2, math.sin(delta) ** 2
    return np.array(
        [
            [c2d, 1j * s2d * c2x, 1j * s2d * s2x],
            [1j * s2d * c2x, cd2 - sd2 * c4x, -sd2 * s4x],
            [1j * s2d * s2x, -sd2 * s4x, cd2 + sd2 * c4x],
        ]
    )


def test_q_matrix_matches_the_symmetric_table(rng):
    q = q_matrix(PlateSpec(0.3, 0.2)).matrix
    assert np.max(np.abs(q - symmetric_table(0.3, 0.2))) < 1e-12
    for _ in range(50):
        spec = random_spec(rng)
        got = q_matrix(spec).matrix
        assert np.max(np.abs(got - symmetric_table(spec.delta, spec.chi))) < 1e-12


def test_q_matrix_structure(rng):
    for _ in range(100):
        q = q_matrix(random_spec(rng)).matrix
        assert np.max(np.abs(q - q.T)) < 1e-12
        assert np.max(np.abs(np.diag(q).imag)) < 1e-12
        assert np.max(np.abs(np.conj(q.T) @ q - np.eye(3))) < 1e-12


def test_q_semigroup_in_thickness(rng):
    for _ in range(50):
        chi = float(rng.uniform(-math.pi, math.pi))
        d1, d2 = rng.uniform(-2.0, 2.0, size=2)
        lhs = q_matrix(PlateSpec(d1, chi)).matrix @ q_matrix(PlateSpec(d2, chi)).matrix
        rhs = q_matrix(PlateSpec(d1 + d2, chi)).matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_q_stack_agrees_with_single_builds():
    deltas = np.linspace(-1.0, 2.0, 7)
    stack = q_stack(deltas, 0.45)
    for d, q in zip(deltas, stack):
        assert np.array_equal(q, q_matrix(PlateSpec(float(d), 0.45)).matrix)


def test_explicit_table_deviates_in_one_corner_only():
    spec = PlateSpec(0.3, 0.2)
    diff = np.abs(q_matrix(spec).matrix - q_matrix_explicit(spec).matrix)
    predicted = abs(math.sin(0.6) - math.sin(0.3)) * abs(math.sin(0.4))
    assert explicit_entry_mismatch(spec) == pytest.approx(predicted, abs=1e-12)
    assert diff[0, 2] == pytest.approx(predicted, abs=1e-12)
    masked = diff.copy()
    masked[0, 2] = 0.0
    assert np.max(masked) < 1e-12


def test_explicit_table_collapses_on_axis_aligned_plates():
    spec = PlateSpec(0.9, 0.0)  # sin(2 chi) = 0 removes the deviating factor
    assert explicit_entry_mismatch(spec) < 1e-15
    diff = q_matrix(spec).matrix - q_matrix_explicit(spec).matrix
    assert np.max(np.abs(diff)) < 1e-12


def test_compose_applies_the_first_plate_first():
    q1 = q_matrix(PlateSpec(0.3, 0.1))
    q2 = q_matrix(PlateSpec(0.7, 0.9))
    total = compose([q1, q2]).matrix
    assert np.allclose(total, q2.matrix @ q1.matrix, atol=1e-15)
    assert not np.allclose(total, q1.matrix @ q2.matrix, atol=1e-3)


def test_compose_validates_input():
    with pytest.raises(UsageError):
        compose([])
    q = q_matrix(PlateSpec(0.3, 0.1))
    g = g_matrix(plate_coefficients(PlateSpec(0.3, 0.1)))
    with pytest.raises(BasisMismatchError):
        compose([q, g])


def test_q_is_the_conjugated_g(rng):
    from biphase import BASIS_CHANGE

    a = BASIS_CHANGE.matrix
    for _ in range(50):
        spec = random_spec(rng)
        g = g_matrix(plate_coefficients(spec)).matrix
        assert np.max(np.abs(q_matrix(spec).matrix - a @ g @ a.T)) < 1e-12


def test_eigen_spectrum_law(rng):
    for _ in range(50):
        delta = float(rng.uniform(0.05, 1.5))
        chi = float(rng.uniform(-math.pi, math.pi))
        system = eigen(q_matrix(PlateSpec(delta, chi)))
        args = [principal(cmath.phase(v)) for v in system.values]
        assert args == pytest.approx([-2.0 * delta, 0.0, 2.0 * delta], abs=1e-10)


def test_eigen_spectrum_wraps_past_the_branch_cut():
    system = eigen(q_matrix(PlateSpec(2.0, 0.3)))
    args = sorted(principal(cmath.phase(v)) for v in system.values)
    assert args == pytest.approx([4.0 - 2.0 * math.pi, 0.0, 2.0 * math.pi - 4.0], abs=1e-10)


def test_quarter_wave_eigenvector_is_the_coupling_direction():
    for chi in (0.0, 0.2, math.pi / 5.0):
        system = eigen(q_matrix(PlateSpec(math.pi / 4.0, chi)))
        values = system.values
        assert values == pytest.approx([-1j, 1.0, 1j], abs=1e-10)
        top = system.states[2].amplitudes
        analytic = np.array([1.0, math.cos(2 * chi), math.sin(2 * chi)]) * S
        assert np.max(np.abs(top - analytic)) < 1e-10


def test_eigen_pairs_satisfy_the_eigenvalue_equation(rng):
    for _ in range(50):
        u = q_matrix(random_spec(rng))
        for value, state in eigen(u).pairs:
            residual = u.matrix @ state.amplitudes - value * state.amplitudes
            assert np.max(np.abs(residual)) < 1e-9


def test_eigen_is_deterministic():
    u = q_matrix(PlateSpec(0.8, 0.35))
    first = eigen(u)
    second = eigen(u)
    assert np.array_equal(first.values, second.values)
    for a, b in zip(first.states, second.states):
        assert np.array_equal(a.amplitudes, b.amplitudes)


def test_eigen_keeps_orthonormal_vectors_at_degeneracies():
    # delta = pi/2 doubles the -1 eigenvalue; Schur columns stay orthonormal
    system = eigen(q_matrix(PlateSpec(math.pi / 2.0, 0.3)))
    values = sorted(system.values, key=lambda v: v.real)
    assert values[0] == pytest.approx(-1.0, abs=1e-10)
    assert values[1] == pytest.approx(-1.0, abs=1e-10)
    assert values[2] == pytest.approx(1.0, abs=1e-10)
    vecs = np.stack([s.amplitudes for s in system.states], axis=1)
    assert np.max(np.abs(np.conj(vecs.T) @ vecs - np.eye(3))) < 1e-10


def test_eigen_rejects_non_unitary_input():
    with pytest.raises(NumericError):
        eigen(Unitary3(1.5 * np.eye(3, dtype=complex), Basis.PMZ))


def test_eigenvector_phase_convention(rng):
    # leading significant component is real and positive
    for _ in range(30):
        system = eigen(q_matrix(random_spec(rng)))
        for state in system.states:
            lead = next(c for c in state.amplitudes if abs(c) > 1e-12)
            assert abs(lead.imag) < 1e-12
            assert lead.real > 0.0


def test_evolve_endpoints_and_grid(rng):
    state = random_state(rng)
    spec = PlateSpec(0.9, 0.25)
    curve = evolve(spec, state, 41)
    assert np.array_equal(curve.state(0).amplitudes, state.amplitudes)
    assert curve.s[0] == 0.0 and curve.s[-1] == pytest.approx(0.9)
    endpoint = q_matrix(spec).matrix @ state.amplitudes
    assert np.max(np.abs(curve.state(-1).amplitudes - endpoint)) < 1e-12


def test_evolve_zero_thickness_is_constant_on_a_unit_interval(rng):
    state = random_state(rng)
    curve = evolve(PlateSpec(0.0, 0.4), state, 11)
    assert curve.s[-1] == 1.0
    assert np.array_equal(curve.state(0).amplitudes, state.amplitudes)
    assert np.max(np.abs(curve.amplitudes - state.amplitudes[None, :])) < 1e-15


def test_evolve_negative_thickness_runs_over_its_magnitude(rng):
    state = random_state(rng)
    spec = PlateSpec(-0.7, 0.3)
    curve = evolve(spec, state, 31)
    assert curve.s[-1] == pytest.approx(0.7)
    endpoint = q_matrix(spec).matrix @ state.amplitudes
    assert np.max(np.abs(curve.state(-1).amplitudes - endpoint)) < 1e-12


def test_evolve_validates_input(rng):
    state = random_state(rng)
    with pytest.raises(UsageError):
        evolve(PlateSpec(0.5, 0.0), state, 1)
    fock = StateVector(np.array([1.0, 0.0, 0.0], dtype=complex), Basis.FOCK)
    with pytest.raises(BasisMismatchError):
        evolve(PlateSpec(0.5, 0.0), fock, 5)


def test_unitary3_shape_check():
    with pytest.raises(UsageError):
        Unitary3(np.eye(2, dtype=complex), Basis.PMZ)
