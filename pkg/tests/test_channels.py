import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qnoise import linalg as la
from qnoise.channels import (CANONICAL, NORMALIZED, ChiMatrix, EvolutionMatrix, KrausSet,
                             UnitaryDilation, apply_channel, basis_change_matrix,
                             channel_rank, chi_change_basis, chi_to_evolution, chi_to_kraus,
                             choi_state, dilation_to_kraus, effective_measurement_check,
                             evolution_power, evolution_to_chi, evolve_density, identity_chi,
                             kraus_to_chi, kraus_to_dilation, kraus_to_evolution, pauli_basis,
                             pauli_labels, pure_noise_channel, random_channel, tp_deviation,
                             unitary_channel, unitary_evolution)
from qnoise.errors import DimensionError, NotCompletelyPositiveError, ValidationError
from qnoise.noise import amplitude_kraus, phase_flip_kraus

from conftest import random_density, random_matrix


def brute_force_evolution(kraus):
    """Column j is vec(E(unvec(e_j))): the action on matrix units."""
    s = kraus.dim
    cols = []
    for j in range(s * s):
        unit = la.unvec(la.ket(j, s * s))
        cols.append(la.vec(apply_channel(kraus, unit, check=False)))
    return np.column_stack(cols)


def test_kraus_set_validation():
    with pytest.raises(ValidationError):
        KrausSet((np.eye(2) * 0.5,))
    relaxed = KrausSet((np.eye(2) * 0.5,), relaxed=True)
    assert not relaxed.is_trace_preserving
    with pytest.raises(DimensionError):
        KrausSet((np.eye(2), np.eye(3)))
    with pytest.raises(ValidationError):
        KrausSet(())


def test_identity_chi_frozen():
    chi = kraus_to_chi(KrausSet((np.eye(2),)))
    expected = np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]])
    np.testing.assert_array_equal(chi.matrix, expected)
    assert chi.trace == 2
    assert channel_rank(chi) == 1
    np.testing.assert_array_equal(chi.normalized().matrix, expected / 2)
    assert chi.normalized().canonical().trace == 2


def test_chi_reference_marginal_is_identity(rng):
    k = random_channel(3, 2, rng)
    chi = kraus_to_chi(k).matrix
    np.testing.assert_allclose(la.partial_trace(chi, (3, 3), [0]), np.eye(3), atol=1e-12)


def test_chi_matrix_validation():
    with pytest.raises(ValidationError):
        ChiMatrix(np.eye(4), 2, "other")
    with pytest.raises(DimensionError):
        ChiMatrix(np.eye(3), 2)
    not_hermitian = np.eye(4, dtype=complex)
    not_hermitian[0, 1] = 1
    with pytest.raises(ValidationError):
        ChiMatrix(not_hermitian, 2)


def test_chi_to_kraus_rejects_non_cp():
    bad = np.diag([1.5, 0.5, 0.5, -0.5]).astype(complex)
    with pytest.raises(NotCompletelyPositiveError) as err:
        chi_to_kraus(ChiMatrix(bad, 2))
    assert err.value.details["eigenvalue"] == pytest.approx(-0.5)


def test_evolution_matches_brute_force(rng):
    for s, m in ((2, 1), (2, 3), (3, 2), (4, 2)):
        k = random_channel(s, m, rng)
        np.testing.assert_allclose(kraus_to_evolution(k).matrix, brute_force_evolution(k),
                                   atol=1e-13)


def test_chi_evolution_reshuffle_is_involution(rng):
    k = random_channel(3, 2, rng)
    chi = kraus_to_chi(k)
    g = chi_to_evolution(chi)
    np.testing.assert_allclose(g.matrix, kraus_to_evolution(k).matrix, atol=1e-13)
    np.testing.assert_array_equal(evolution_to_chi(g).matrix, chi.matrix)


def test_evolution_composition_order(rng):
    a, b = random_channel(2, 2, rng), random_channel(2, 3, rng)
    rho = random_density(rng, 2)
    both = kraus_to_evolution(b) @ kraus_to_evolution(a)
    expected = apply_channel(b, apply_channel(a, rho))
    np.testing.assert_allclose(evolve_density(both, rho), expected, atol=1e-13)


def test_evolution_power(rng):
    k = random_channel(2, 2, rng)
    g = kraus_to_evolution(k)
    np.testing.assert_allclose(evolution_power(g, 3).matrix, (g @ g @ g).matrix, atol=1e-13)
    np.testing.assert_array_equal(evolution_power(g, 0).matrix, np.eye(4))


def test_unitary_evolution(rng):
    u = np.linalg.qr(random_matrix(rng, 3))[0]
    np.testing.assert_allclose(unitary_evolution(u).matrix,
                               kraus_to_evolution(unitary_channel(u)).matrix, atol=1e-14)
    with pytest.raises(ValidationError):
        unitary_channel(2 * np.eye(2))


def test_choi_state_is_normalized_chi(rng):
    k = random_channel(3, 3, rng)
    np.testing.assert_allclose(choi_state(k), kraus_to_chi(k).matrix / 3, atol=1e-13)


def test_dilation_blocks_and_round_trip(rng):
    k = random_channel(2, 3, rng)
    d = kraus_to_dilation(k)
    assert d.matrix.shape == (6, 6)
    assert la.is_unitary(d.matrix)
    for i, op in enumerate(k.operators):
        np.testing.assert_allclose(d.block(i, 0), op, atol=1e-14)
    back = dilation_to_kraus(d)
    np.testing.assert_allclose(kraus_to_chi(back).matrix, kraus_to_chi(k).matrix, atol=1e-13)
    np.testing.assert_array_equal(kraus_to_dilation(k).matrix, d.matrix)


def test_dilation_completion_frozen():
    d = kraus_to_dilation(amplitude_kraus(0.36))
    # columns 0, 1: stacked Kraus columns; e_1 residual gives column 2; e_3 is already orthogonal
    expected = np.array([[1, 0, 0, 0],
                         [0, 0.8, 0.6, 0],
                         [0, 0.6, -0.8, 0],
                         [0, 0, 0, 1]])
    np.testing.assert_allclose(d.matrix, expected, atol=1e-15)


def test_dilation_rejects_non_unitary():
    with pytest.raises(ValidationError):
        dilation_to_kraus(UnitaryDilation(2 * np.eye(4, dtype=complex), 2, 2))


def test_chi_to_kraus_reproduces_channel(rng):
    k = random_channel(2, 2, rng)
    k2 = chi_to_kraus(kraus_to_chi(k))
    assert len(k2) == 2
    rho = random_density(rng, 2)
    np.testing.assert_allclose(apply_channel(k2, rho), apply_channel(k, rho), atol=1e-13)


def test_pauli_basis():
    basis = pauli_basis(2)
    assert pauli_labels(2)[:5] == ["II", "IX", "IY", "IZ", "XI"]
    u0 = basis_change_matrix(basis)
    np.testing.assert_allclose(u0.conj().T @ u0, np.eye(16), atol=1e-14)
    chi_p = chi_change_basis(kraus_to_chi(KrausSet((np.eye(2),))), pauli_basis(1))
    expected = np.zeros((4, 4))
    expected[0, 0] = 2
    np.testing.assert_allclose(chi_p, expected, atol=1e-15)
    with pytest.raises(ValidationError):
        basis_change_matrix([np.eye(2)] * 4)


def test_phase_flip_chi_in_pauli_basis():
    chi_p = chi_change_basis(kraus_to_chi(phase_flip_kraus(0.1)), pauli_basis(1))
    np.testing.assert_allclose(np.diag(chi_p).real, [1.8, 0, 0, 0.2], atol=1e-15)


def test_effective_measurement(rng):
    k = random_channel(3, 2, rng)
    c_in = random_matrix(rng, 3, 1).ravel()
    c_m = random_matrix(rng, 3, 1).ravel()
    p, pt = effective_measurement_check(k, c_in / np.linalg.norm(c_in),
                                        c_m / np.linalg.norm(c_m))
    assert abs(p - pt) < 1e-13
    with pytest.raises(ValidationError):
        effective_measurement_check(k, c_in, c_m)


def test_pure_noise_of_unitary_is_identity(rng):
    u = np.linalg.qr(random_matrix(rng, 4))[0]
    chi = pure_noise_channel(unitary_evolution(u), u)
    np.testing.assert_allclose(chi.normalized().matrix, identity_chi(4).matrix, atol=1e-13)


def test_apply_channel_rejects_bad_state():
    with pytest.raises(ValidationError):
        apply_channel(phase_flip_kraus(0.1), np.diag([2.0, 0.0]))


def test_tp_deviation():
    assert tp_deviation((np.eye(2),)) == 0
    assert tp_deviation((np.eye(2) * 0.5,)) > 0.5


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_round_trips_property(s, m, seed):
    k = random_channel(s, m, np.random.default_rng(seed))
    chi = kraus_to_chi(k)
    assert abs(chi.trace - s) < 1e-12
    again = kraus_to_chi(chi_to_kraus(chi))
    np.testing.assert_allclose(again.matrix, chi.matrix, atol=1e-11)
    assert channel_rank(chi) <= m
    assert chi.is_physical()
