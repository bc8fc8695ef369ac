import math

import numpy as np
import pytest
import scipy.linalg

from qnoise import linalg as la
from qnoise.errors import ValidationError
from qnoise.gates import (CNOT, CZ, GATE_NAMES, computational_embedding, custom_gate,
                          delete_levels, gate_library, qutrit_xy_unitary, xy_unitary)

SQISW = np.array([[1, 0, 0, 0],
                  [0, 1 / math.sqrt(2), -1j / math.sqrt(2), 0],
                  [0, -1j / math.sqrt(2), 1 / math.sqrt(2), 0],
                  [0, 0, 0, 1]])
ISWAP = np.array([[1, 0, 0, 0], [0, 0, -1j, 0], [0, -1j, 0, 0], [0, 0, 0, 1]])


def test_xy_closed_form_targets():
    np.testing.assert_allclose(xy_unitary(math.pi / 2), SQISW, atol=1e-15)
    np.testing.assert_allclose(xy_unitary(math.pi), ISWAP, atol=1e-15)


def test_qutrit_closed_form_reduces_to_cz():
    np.testing.assert_allclose(delete_levels(qutrit_xy_unitary(2 * math.pi)), CZ, atol=1e-15)


@pytest.mark.parametrize("name,target", [("SQiSW", SQISW), ("iSWAP", ISWAP), ("CNOT", CNOT)])
def test_hamiltonian_generates_target(name, target):
    g = gate_library(name, t_oper=2.5)
    np.testing.assert_allclose(scipy.linalg.expm(-2.5j * g.hamiltonian), target, atol=1e-12)
    np.testing.assert_allclose(g.unitary(2.5), g.target_unitary, atol=1e-12)


def test_hamiltonian_matches_closed_form_midway():
    g = gate_library("SQiSW")
    for t in (0.1, 0.37, 1.6):
        np.testing.assert_allclose(g.unitary(t), xy_unitary(math.pi / 2 * t), atol=1e-13)
    q = gate_library("CZ_qutrit")
    np.testing.assert_allclose(q.unitary(0.3), qutrit_xy_unitary(2 * math.pi * 0.3), atol=1e-13)


def test_cz_qutrit_spec():
    g = gate_library("CZ_qutrit")
    assert g.sys_dims == (2, 3) and g.comp_dim == 4
    np.testing.assert_allclose(g.ideal_unitary(1.0), CZ, atol=1e-12)
    assert g.ideal_unitary(0.5) is None
    w = computational_embedding()
    np.testing.assert_array_equal(w.conj().T @ w, np.eye(4))
    assert w[4, 3] == 1  # |11> sits at index 4 of qubit (x) qutrit


def test_gate_library_errors():
    assert set(GATE_NAMES) >= {"SQiSW", "CNOT", "CZ_qutrit"}
    with pytest.raises(ValidationError):
        gate_library("Toffoli")
    with pytest.raises(ValidationError):
        gate_library("CNOT", t_oper=0)


def test_custom_gate():
    h = np.kron(la.SIGMA_Z, la.SIGMA_Z)
    g = custom_gate(h, (2, 2), 0.5)
    np.testing.assert_allclose(g.target_unitary, scipy.linalg.expm(-0.5j * h), atol=1e-13)
    with pytest.raises(ValidationError):
        custom_gate(np.triu(np.ones((4, 4))), (2, 2), 1.0)
