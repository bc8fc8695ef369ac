"""Gate library: Hamiltonians and target unitaries of the simulated gates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .channels import KrausSet
from .errors import ValidationError
from .noise import qutrit_reduction

GATE_NAMES = ("SQiSW", "iSWAP", "CNOT", "CZ_qutrit", "identity")

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


@dataclass(frozen=True)
class GateSpec:
    """A gate driven by a constant Hamiltonian for ``t_oper``.

    ``sys_dims`` is the physical space the Hamiltonian acts on.  When it is
    larger than the computational space (the qutrit CZ), ``embedding`` is the
    isometry from computational to physical states and ``reduction`` the
    Kraus map back.
    """

    name: str
    sys_dims: tuple
    hamiltonian: np.ndarray
    t_oper: float
    target_unitary: np.ndarray
    embedding: np.ndarray | None = None
    reduction: KrausSet | None = None

    @property
    def phys_dim(self) -> int:
        return int(np.prod(self.sys_dims))

    @property
    def comp_dim(self) -> int:
        return self.target_unitary.shape[0]

    def unitary(self, t: float) -> np.ndarray:
        """Noiseless evolution of the physical system after time ``t``."""
        return la.matrix_exp_unitary(self.hamiltonian, t)

    def ideal_unitary(self, t: float, tol: float = 1e-9) -> np.ndarray | None:
        """Ideal computational-space unitary at time ``t``, or ``None`` if the
        noiseless evolution leaks out of the computational space at that time."""
        u = self.unitary(t)
        if self.embedding is None:
            return u
        w = self.embedding
        comp = la.dagger(w) @ u @ w
        return comp if la.is_unitary(comp, tol) else None


def xy_unitary(gt: float) -> np.ndarray:
    """Closed-form XY-interaction evolution on two qubits."""
    c, s = math.cos(gt / 2), math.sin(gt / 2)
    return np.array([[1, 0, 0, 0],
                     [0, c, -1j * s, 0],
                     [0, -1j * s, c, 0],
                     [0, 0, 0, 1]], dtype=complex)


def qutrit_xy_unitary(gt: float) -> np.ndarray:
    """Closed-form ``|11> <-> |02>`` resonance on qubit (x) qutrit."""
    c, s = math.cos(gt / 2), math.sin(gt / 2)
    u = np.eye(6, dtype=complex)
    u[2, 2] = u[4, 4] = c
    u[2, 4] = u[4, 2] = -1j * s
    return u


def xy_hamiltonian(g: float) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    h[1, 2] = h[2, 1] = g / 2
    return h


def qutrit_xy_hamiltonian(g: float) -> np.ndarray:
    h = np.zeros((6, 6), dtype=complex)
    # |02> is index 2, |11> is index 4 in the qubit (x) qutrit basis
    h[2, 4] = h[4, 2] = g / 2
    return h


def cnot_hamiltonian(t_oper: float) -> np.ndarray:
    """``(pi/t_oper) |1><1| (x) (I - X)/2``; its exponential at ``t_oper`` is CNOT."""
    return (math.pi / t_oper) * np.kron(np.diag([0, 1]), (la.SIGMA_I - la.SIGMA_X) / 2)


def computational_embedding() -> np.ndarray:
    """Isometry from two qubits into qubit (x) qutrit (qutrit levels 0 and 1)."""
    w = np.zeros((6, 4), dtype=complex)
    for q in range(2):
        for r in range(2):
            w[3 * q + r, 2 * q + r] = 1.0
    return w


def qutrit_cz_reduction() -> KrausSet:
    """Level reduction applied to the qutrit factor of qubit (x) qutrit."""
    red = qutrit_reduction()
    return KrausSet(tuple(np.kron(np.eye(2), e) for e in red.operators))


def delete_levels(u: np.ndarray, drop=(2, 5)) -> np.ndarray:
    """Remove rows and columns of the qutrit level |2> states (|02>, |12>)."""
    keep = [i for i in range(u.shape[0]) if i not in drop]
    return u[np.ix_(keep, keep)]


def gate_library(name: str, t_oper: float = 1.0, g: float | None = None) -> GateSpec:
    """Build one of the built-in gates.

    ``g`` overrides the coupling constant for the XY gates; by default it is
    chosen so that the gate completes at ``t_oper``.
    """
    if t_oper <= 0:
        raise ValidationError("t_oper must be positive")
    if name in ("SQiSW", "iSWAP"):
        pulse = math.pi / 2 if name == "SQiSW" else math.pi
        g = pulse / t_oper if g is None else g
        return GateSpec(name, (2, 2), xy_hamiltonian(g), t_oper, xy_unitary(pulse))
    if name == "CNOT":
        return GateSpec(name, (2, 2), cnot_hamiltonian(t_oper), t_oper, CNOT.copy())
    if name == "CZ_qutrit":
        g = 2 * math.pi / t_oper if g is None else g
        return GateSpec(name, (2, 3), qutrit_xy_hamiltonian(g), t_oper, CZ.copy(),
                        embedding=computational_embedding(),
                        reduction=qutrit_cz_reduction())
    if name == "identity":
        return GateSpec(name, (2,), np.zeros((2, 2), dtype=complex), t_oper,
                        np.eye(2, dtype=complex))
    raise ValidationError(f"unknown gate {name!r}; choose from {GATE_NAMES}")


def custom_gate(hamiltonian, sys_dims, t_oper: float, name: str = "custom") -> GateSpec:
    h = la.as_matrix(hamiltonian, "hamiltonian")
    sys_dims = la.check_dims(sys_dims, h.shape[0])
    if not la.is_hermitian(h):
        raise ValidationError("gate Hamiltonian must be Hermitian")
    return GateSpec(name, sys_dims, h, t_oper, la.matrix_exp_unitary(h, t_oper))
