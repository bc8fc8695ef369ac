import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from qnoise import linalg as la
from qnoise.errors import DimensionError, NotCompletelyPositiveError, ValidationError

from conftest import random_density, random_matrix


def test_vec_stacks_columns():
    a = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(la.vec(a), [1, 3, 2, 4])
    np.testing.assert_array_equal(la.unvec([1, 3, 2, 4]), a)


def test_unvec_rectangular():
    a = np.arange(6).reshape(2, 3)
    np.testing.assert_array_equal(la.unvec(a.reshape(-1, order="F"), rows=2), a)
    with pytest.raises(DimensionError):
        la.unvec(np.arange(5))


def test_tensor_product_leftmost_is_slowest():
    v = la.tensor_product(la.ket(1, 2)[:, None], la.ket(0, 3)[:, None]).ravel()
    assert np.argmax(v) == 3
    with pytest.raises(ValidationError):
        la.tensor_product()


def test_partial_trace_of_product(rng):
    a, b, c = random_density(rng, 2), random_density(rng, 3), random_density(rng, 2)
    full = la.tensor_product(a, b, c)
    dims = (2, 3, 2)
    np.testing.assert_allclose(la.partial_trace(full, dims, [0]), a, atol=1e-14)
    np.testing.assert_allclose(la.partial_trace(full, dims, [1]), b, atol=1e-14)
    np.testing.assert_allclose(la.partial_trace(full, dims, [0, 2]), np.kron(a, c), atol=1e-14)
    with pytest.raises(DimensionError):
        la.partial_trace(full, dims, [])
    with pytest.raises(DimensionError):
        la.partial_trace(full, (2, 2, 2), [0])


def test_partial_trace_against_index_sum(rng):
    m = random_matrix(rng, 6)
    t = m.reshape(2, 3, 2, 3)
    expected = np.einsum("ijkj->ik", t)
    np.testing.assert_allclose(la.partial_trace(m, (2, 3), [0]), expected, atol=1e-13)


def test_partial_transpose_of_product(rng):
    a, b = random_matrix(rng, 2), random_matrix(rng, 3)
    full = np.kron(a, b)
    np.testing.assert_allclose(la.partial_transpose(full, (2, 3), [1]), np.kron(a, b.T))
    np.testing.assert_allclose(la.partial_transpose(full, (2, 3), [0]), np.kron(a.T, b))
    np.testing.assert_allclose(la.partial_transpose(full, (2, 3), [0, 1]), full.T)


def test_embed_matches_kron(rng):
    op = random_matrix(rng, 2)
    np.testing.assert_allclose(la.embed(op, (2, 3), [0]), np.kron(op, np.eye(3)))
    two = random_matrix(rng, 4)
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(la.embed(two, (2, 2), [1, 0]), swap @ two @ swap, atol=1e-14)
    big = la.embed(two, (2, 2, 2), [0, 2])
    ref = np.einsum("acbd,ef->aecbfd", two.reshape(2, 2, 2, 2), np.eye(2)).reshape(8, 8)
    np.testing.assert_allclose(big, ref, atol=1e-14)
    with pytest.raises(DimensionError):
        la.embed(two, (2, 2), [0, 0])


def test_predicates(rng):
    h = random_matrix(rng, 3)
    h = h + h.conj().T
    assert la.is_hermitian(h)
    assert not la.is_hermitian(h + 1j * np.eye(3))
    assert la.is_unitary(scipy.linalg.expm(-1j * h))
    assert not la.is_unitary(2 * np.eye(2))
    assert la.is_psd(random_density(rng, 3))
    assert not la.is_psd(np.diag([1.0, -0.1]))


def test_herm_eig_descending(rng):
    h = random_matrix(rng, 4)
    h = h + h.conj().T
    w, v = la.herm_eig(h)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-12)
    with pytest.raises(ValidationError):
        la.herm_eig(random_matrix(rng, 3))


def test_matrix_exp_unitary_against_scipy(rng):
    h = random_matrix(rng, 5)
    h = h + h.conj().T
    np.testing.assert_allclose(la.matrix_exp_unitary(h, 0.7),
                               scipy.linalg.expm(-0.7j * h), atol=1e-12)
    np.testing.assert_array_equal(la.matrix_exp_unitary(h, 0), np.eye(5))


def test_psd_eigvals_clamps_and_rejects():
    w, _ = la.psd_eigvals(np.diag([1.0, 1e-18, -1e-13]))
    np.testing.assert_array_equal(w, [1.0, 0.0, 0.0])
    with pytest.raises(NotCompletelyPositiveError) as err:
        la.psd_eigvals(np.diag([1.0, -0.5]))
    assert err.value.details["eigenvalue"] == -0.5


def test_matrix_sqrt_psd(rng):
    rho = random_density(rng, 4)
    r = la.matrix_sqrt_psd(rho)
    np.testing.assert_allclose(r @ r, rho, atol=1e-13)


def test_max_entangled():
    v = la.max_entangled(3)
    assert np.isclose(np.linalg.norm(v), 1)
    assert np.isclose(v[4], 1 / np.sqrt(3))


def test_as_matrix_rejects_bad_input():
    with pytest.raises(DimensionError):
        la.as_matrix(np.zeros(3))
    with pytest.raises(ValidationError):
        la.as_matrix([[np.nan]])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 2, 2)]), st.integers(0, 2**32 - 1))
def test_partial_operations_preserve_trace(dims, seed):
    rng = np.random.default_rng(seed)
    n = int(np.prod(dims))
    m = random_matrix(rng, n)
    for k in range(len(dims)):
        assert np.isclose(np.trace(la.partial_trace(m, dims, [k])), np.trace(m))
        pt = la.partial_transpose(m, dims, [k])
        assert np.isclose(np.trace(pt), np.trace(m))
        np.testing.assert_allclose(la.partial_transpose(pt, dims, [k]), m)
