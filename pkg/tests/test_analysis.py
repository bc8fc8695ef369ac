import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qnoise import analysis as an
from qnoise import linalg as la
from qnoise.channels import ChiMatrix, KrausSet, NORMALIZED, identity_chi, kraus_to_chi
from qnoise.errors import DimensionError, ValidationError
from qnoise.gates import gate_library
from qnoise.noise import RelaxationParams
from qnoise.simulation import simulate

from conftest import random_density, random_matrix


def pure_state_negativity(psi, dims):
    """Oracle via Schmidt amplitudes: ((sum sigma)^2 - 1) / 2."""
    sigma = np.linalg.svd(psi.reshape(dims), compute_uv=False)
    return (np.sum(sigma) ** 2 - 1) / 2


# --- fidelity --------------------------------------------------------------


def test_fidelity_pure_reference(rng):
    rho = random_density(rng, 4)
    psi = la.max_entangled(2)
    expected = float(np.real(psi.conj() @ rho @ psi))
    assert an.fidelity(la.projector(psi), rho) == pytest.approx(expected, abs=1e-13)
    assert an.fidelity(rho, la.projector(psi)) == pytest.approx(expected, abs=1e-13)


def test_fidelity_commuting_states():
    p, q = np.array([0.5, 0.3, 0.2, 0]), np.array([0.1, 0.1, 0.4, 0.4])
    expected = np.sum(np.sqrt(p * q)) ** 2
    assert an.fidelity(np.diag(p), np.diag(q)) == pytest.approx(expected, abs=1e-14)


def test_fidelity_accepts_either_convention():
    chi = kraus_to_chi(KrausSet((np.eye(2),)))
    assert an.fidelity(chi, chi.normalized()) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValidationError):
        an.fidelity(np.eye(4) * 0.7, chi)
    with pytest.raises(DimensionError):
        an.fidelity(identity_chi(2), identity_chi(3))


# --- phase-flip code -------------------------------------------------------


@pytest.mark.parametrize("p", [0.0, 0.05, 0.2, 0.35, 0.5, 0.9])
def test_code_and_noise_fidelities(p):
    ideal = an.chi_ideal()
    assert an.fidelity(ideal, an.chi_noise(p)) == pytest.approx(1 - p, abs=1e-12)
    analytic, simulated = an.phase_flip_code(p)
    np.testing.assert_allclose(simulated.matrix, analytic.matrix, atol=1e-14)
    assert an.fidelity(ideal, analytic) == pytest.approx(1 - 3 * p**2 + 2 * p**3, abs=1e-12)


def test_ecc_frozen_row():
    (row,) = an.ecc_table([0.2])
    assert row == pytest.approx((0.2, 0.8, 0.896, 0.896), abs=1e-12)


def test_code_chi_bell_structure():
    p = 0.1
    chi = an.chi_code(p).matrix
    ok = 1 - 3 * p**2 + 2 * p**3
    phi_plus = an.BELL_PHI_PLUS
    psi_plus = an.BELL_PSI_PLUS
    assert np.real(phi_plus @ chi @ phi_plus) == pytest.approx(ok)
    assert np.real(psi_plus @ chi @ psi_plus) == pytest.approx(1 - ok)
    assert abs(an.BELL_PHI_MINUS @ chi @ an.BELL_PHI_MINUS) < 1e-15


def test_code_crossover_at_half():
    ideal = an.chi_ideal()
    for p, better in ((0.3, True), (0.7, False)):
        code = an.fidelity(ideal, an.chi_code(p))
        plain = an.fidelity(ideal, an.chi_noise(p))
        assert (code > plain) is better


# --- partial transposes and negativity --------------------------------------


def test_bell_partial_transpose_is_half_swap():
    rho = np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]]) / 2
    np.testing.assert_allclose(la.projector(an.BELL_PHI_PLUS), rho, atol=1e-16)
    pt = la.partial_transpose(rho, (2, 2), [1])
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_array_equal(pt, swap / 2)
    lam = sympy.symbols("lam")
    poly = sympy.Matrix(4, 4, lambda i, j: sympy.Rational(int(swap[i, j]), 2)).charpoly(lam)
    roots = sympy.roots(poly.as_expr(), lam)
    assert roots == {sympy.Rational(1, 2): 3, -sympy.Rational(1, 2): 1}
    assert an.negativity(rho, an.SplitSpec.reference(2)) == pytest.approx(0.5, abs=1e-15)


def test_explicit_split_formulas_match_generic(rng):
    first = an.SplitSpec.ancilla_vs_physical(2)
    second = an.SplitSpec.channel_vs_channel()
    for _ in range(100):
        m = random_matrix(rng, 16)
        np.testing.assert_array_equal(an.partial_transpose_first_split(m),
                                      la.partial_transpose(m, first.dims, first.transposed))
        np.testing.assert_array_equal(an.partial_transpose_second_split(m),
                                      la.partial_transpose(m, second.dims, second.transposed))


def test_product_state_has_zero_negativity(rng):
    rho = np.kron(random_density(rng, 2), random_density(rng, 3))
    assert an.negativity(rho, an.SplitSpec.general((2, 3), [0])) == 0.0


@pytest.mark.parametrize("gate", ["SQiSW", "CNOT"])
@pytest.mark.parametrize("t", [0.25, 0.5, 1.0, 1.5])
def test_unitary_choi_negativity_against_schmidt(gate, t):
    """Second split of a two-qubit unitary's Choi state (pure)."""
    u = gate_library(gate).unitary(t)
    chi = kraus_to_chi(KrausSet((u,))).normalized()
    w, v = la.herm_eig(chi.matrix)
    psi = v[:, 0] * math.sqrt(w[0])
    # reorder (A, A', B, B') with reference (A, A') -> (A, B | A', B)
    t4 = psi.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1)
    expected = pure_state_negativity(t4, (4, 4))
    assert an.negativity(chi, an.SplitSpec.channel_vs_channel()) == pytest.approx(expected,
                                                                                 abs=1e-12)


def test_split_specs():
    assert an.SplitSpec.named("ancilla_vs_physical", 4).dims == (2, 2, 2, 2)
    assert an.SplitSpec.named("ancilla_vs_physical", 3).dims == (3, 3)
    with pytest.raises(ValidationError):
        an.SplitSpec.named("channel_vs_channel", 2)
    with pytest.raises(ValidationError):
        an.SplitSpec.named("diagonal", 4)


# --- sweeps ----------------------------------------------------------------


def test_depolarizing_negativity_closed_form():
    """Isotropic state: N = max(0, (s F - 1)/2) with F = 1 - p + p/s^2."""
    grid = np.linspace(0, 1, 21)
    for res in an.depolarizing_negativity_sweep([2, 3, 5], grid):
        s = res.meta["s"]
        expected = np.maximum(0, (s * (1 - grid + grid / s**2) - 1) / 2)
        np.testing.assert_allclose(res.values, expected, atol=1e-13)
        assert an.critical_noise(res) == pytest.approx(s / (s + 1), abs=1e-12)


def test_sweep_validation():
    with pytest.raises(ValidationError):
        an.depolarizing_negativity_sweep([2], [])
    with pytest.raises(ValidationError):
        an.depolarizing_negativity_sweep([11], [0.1])
    with pytest.raises(ValidationError):
        an.SweepResult("p", [0.2, 0.1], [1, 2], "x")
    with pytest.raises(ValidationError):
        an.SweepResult("p", [0.1, 0.2], [1, np.nan], "x")
    flat = an.SweepResult("p", [0, 1], [1, 1], "x")
    with pytest.raises(ValidationError):
        an.critical_noise(flat)


def test_parallel_sweep_is_identical():
    grid = np.linspace(0, 1, 11)
    a = an.depolarizing_negativity_sweep([4], grid, jobs=1)[0].values
    b = an.depolarizing_negativity_sweep([4], grid, jobs=4)[0].values
    np.testing.assert_array_equal(a, b)


def test_entanglement_dynamics_first_split_decays():
    run = simulate(gate_library("SQiSW"), RelaxationParams(5, 3), dt=0.01,
                   sample_times=np.linspace(0, 3, 7))
    res = an.entanglement_dynamics(run, "ancilla_vs_physical")
    assert res.values[0] == pytest.approx(1.5, abs=1e-12)
    assert np.all(np.diff(res.values) < 0)
    fid = an.fidelity_trajectory(run)
    assert fid.values[0] == pytest.approx(1.0, abs=1e-12)
    tilde = an.fidelity_trajectory(run, reference="identity")
    assert tilde.metric == "fidelity_tilde" and np.all(tilde.values <= 1)
    with pytest.raises(ValidationError):
        an.entanglement_dynamics(run, source="rho")


def test_chi_tilde_dynamics_skips_leaky_samples():
    run = simulate(gate_library("CZ_qutrit"), sample_times=[0.5, 1.0])
    res = an.entanglement_dynamics(run, "channel_vs_channel", source="chi_tilde")
    np.testing.assert_array_equal(res.grid, [1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_negativity_invariant_under_local_unitaries(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 4)
    u = np.kron(np.linalg.qr(random_matrix(rng, 2))[0], np.linalg.qr(random_matrix(rng, 2))[0])
    split = an.SplitSpec.reference(2)
    assert an.negativity(u @ rho @ u.conj().T, split) == pytest.approx(
        an.negativity(rho, split), abs=1e-12)
