"""Quantum channel representations and the conversions between them.

Four equivalent descriptions of a channel on an ``s``-dimensional system are
supported:

``KrausSet``
    operator sum ``rho -> sum_k E_k rho E_k^H``.
``ChiMatrix``
    ``chi = e e^H`` where column ``k`` of ``e`` is ``vec(E_k)``.  The
    *canonical* convention has trace ``s``; the *normalized* one has trace 1
    and coincides with the Choi-Jamiolkowski state.
``EvolutionMatrix``
    ``G`` with ``vec(rho_out) = G vec(rho_in)``; a permutation of chi.
``UnitaryDilation``
    unitary on environment (first factor) tensor system whose first block
    column stacks the Kraus operators.

In the Choi state the untouched reference copy is the first tensor factor and
the channel acts on the second.  With column stacking this makes the
normalized chi identical to the Choi state, and tracing out the second
(output) factor of the canonical chi gives the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionError, NotCompletelyPositiveError, ValidationError

TOL_TP = 1e-10
TOL_RANK = 1e-10
TOL_DENSITY = 1e-8
_GS_DROP = 1e-8

CANONICAL = "canonical"
NORMALIZED = "normalized"


@dataclass(frozen=True)
class KrausSet:
    """Ordered Kraus operators of shape ``out_dim x in_dim``.

    Trace preservation is checked at construction unless ``relaxed`` is set.
    """

    operators: tuple
    relaxed: bool = False

    def __post_init__(self):
        ops = tuple(la.as_matrix(op, "Kraus operator") for op in self.operators)
        if not ops:
            raise ValidationError("a Kraus set needs at least one operator")
        shape = ops[0].shape
        if any(op.shape != shape for op in ops):
            raise DimensionError("Kraus operators have mismatched shapes")
        object.__setattr__(self, "operators", ops)
        if not self.relaxed:
            dev = tp_deviation(ops)
            if dev > TOL_TP:
                raise ValidationError("Kraus operators are not trace preserving",
                                      deviation=dev)

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def dim(self) -> int:
        if self.in_dim != self.out_dim:
            raise DimensionError("rectangular Kraus set has no single dimension")
        return self.in_dim

    @property
    def is_trace_preserving(self) -> bool:
        return tp_deviation(self.operators) <= TOL_TP

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)


def tp_deviation(ops: Sequence[np.ndarray]) -> float:
    """Largest entry of ``|sum_k E_k^H E_k - I|``."""
    acc = sum(la.dagger(op) @ op for op in ops)
    return float(np.max(np.abs(acc - np.eye(acc.shape[0]))))


@dataclass(frozen=True)
class ChiMatrix:
    """Chi-matrix in the standard (matrix-unit) basis with an explicit trace convention."""

    matrix: np.ndarray
    dim: int
    convention: str = CANONICAL

    def __post_init__(self):
        m = la.as_matrix(self.matrix, "chi")
        s = int(self.dim)
        if m.shape != (s * s, s * s):
            raise DimensionError(f"chi for s={s} must be {s*s}x{s*s}, got {m.shape}")
        if self.convention not in (CANONICAL, NORMALIZED):
            raise ValidationError(f"unknown trace convention {self.convention!r}")
        if not la.is_hermitian(m):
            raise ValidationError("chi must be Hermitian")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", s)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def canonical(self) -> "ChiMatrix":
        if self.convention == CANONICAL:
            return self
        return ChiMatrix(self.matrix * self.dim, self.dim, CANONICAL)

    def normalized(self) -> "ChiMatrix":
        if self.convention == NORMALIZED:
            return self
        return ChiMatrix(self.matrix / self.dim, self.dim, NORMALIZED)

    def is_physical(self, tol: float = la.TOL_PSD) -> bool:
        return la.is_psd(self.matrix, tol)


@dataclass(frozen=True)
class EvolutionMatrix:
    """Linear map ``vec(rho_in) -> vec(rho_out)`` (column stacking)."""

    matrix: np.ndarray
    dim: int

    def __post_init__(self):
        m = la.as_matrix(self.matrix, "evolution matrix")
        s = int(self.dim)
        if m.shape != (s * s, s * s):
            raise DimensionError(f"G for s={s} must be {s*s}x{s*s}, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", s)

    def __matmul__(self, other: "EvolutionMatrix") -> "EvolutionMatrix":
        """Composition: ``(self @ other)`` applies ``other`` first."""
        if other.dim != self.dim:
            raise DimensionError("cannot compose evolution matrices of different dims")
        return EvolutionMatrix(self.matrix @ other.matrix, self.dim)


@dataclass(frozen=True)
class UnitaryDilation:
    """Unitary on ``env (x) system``; block ``(k, 0)`` is Kraus operator ``k``."""

    matrix: np.ndarray
    sys_dim: int
    env_dim: int
    env_initial: int = 0

    def __post_init__(self):
        m = la.as_matrix(self.matrix, "dilation")
        n = int(self.sys_dim) * int(self.env_dim)
        if m.shape != (n, n):
            raise DimensionError(f"dilation must be {n}x{n}, got {m.shape}")
        if not 0 <= self.env_initial < self.env_dim:
            raise DimensionError("env_initial outside environment basis")
        object.__setattr__(self, "matrix", m)

    def block(self, row: int, col: int) -> np.ndarray:
        s = self.sys_dim
        return self.matrix[row * s:(row + 1) * s, col * s:(col + 1) * s]


# ---------------------------------------------------------------------------
# Operator sum
# ---------------------------------------------------------------------------


def is_density_matrix(rho, tol: float = TOL_DENSITY) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if abs(np.trace(rho) - 1) > tol or not la.is_hermitian(rho, tol):
        return False
    return la.herm_eig(rho, tol)[0][-1] >= -tol


def apply_channel(kraus: KrausSet, rho, check: bool = True) -> np.ndarray:
    """``sum_k E_k rho E_k^H``.

    With ``check`` the input must be a density matrix; pass ``check=False``
    to push arbitrary operators through (linearity tests, matrix units).
    """
    rho = la.as_matrix(rho, "rho")
    if rho.shape != (kraus.in_dim, kraus.in_dim):
        raise DimensionError(f"rho of shape {rho.shape} does not fit a channel on "
                             f"dimension {kraus.in_dim}")
    if check and not is_density_matrix(rho):
        raise ValidationError("input is not a density matrix")
    return sum(op @ rho @ la.dagger(op) for op in kraus.operators)


def unitary_channel(u) -> KrausSet:
    u = la.as_matrix(u, "unitary")
    if not la.is_unitary(u):
        raise ValidationError("operator is not unitary")
    return KrausSet((u,))


# ---------------------------------------------------------------------------
# Chi matrix
# ---------------------------------------------------------------------------


def kraus_to_chi(kraus: KrausSet) -> ChiMatrix:
    s = kraus.dim
    e = np.column_stack([la.vec(op) for op in kraus.operators])
    return ChiMatrix(e @ la.dagger(e), s, CANONICAL)


def _as_canonical(chi: ChiMatrix) -> ChiMatrix:
    if not isinstance(chi, ChiMatrix):
        raise ValidationError("expected a ChiMatrix")
    return chi.canonical()


def chi_to_kraus(chi: ChiMatrix, tol: float = la.TOL_PSD) -> KrausSet:
    """Minimal Kraus set from the spectral decomposition of chi.

    One operator per eigenvalue above ``TOL_RANK``, largest first.

    Raises
    ------
    NotCompletelyPositiveError
        If chi has an eigenvalue below ``-tol``.
    """
    chi = _as_canonical(chi)
    w, v = la.herm_eig(chi.matrix)
    if w[-1] < -tol:
        raise NotCompletelyPositiveError("chi-matrix is not positive semidefinite; "
                                         "the map is not completely positive",
                                         eigenvalue=float(w[-1]))
    keep = w > TOL_RANK
    e = v[:, keep] * np.sqrt(w[keep])
    ops = tuple(la.unvec(e[:, k]) for k in range(e.shape[1]))
    return KrausSet(ops)


def channel_rank(chi: ChiMatrix) -> int:
    w = la.herm_eig(_as_canonical(chi).matrix)[0]
    return int(np.count_nonzero(w > TOL_RANK))


def _reshuffle(m: np.ndarray, s: int) -> np.ndarray:
    # G[m + s*n, j + s*k] = chi[j*s + m, k*s + n]; the index map is an involution
    return m.reshape(s, s, s, s).transpose(3, 1, 2, 0).reshape(s * s, s * s)


def chi_to_evolution(chi: ChiMatrix) -> EvolutionMatrix:
    chi = _as_canonical(chi)
    return EvolutionMatrix(_reshuffle(chi.matrix, chi.dim), chi.dim)


def evolution_to_chi(g: EvolutionMatrix) -> ChiMatrix:
    return ChiMatrix(_reshuffle(g.matrix, g.dim), g.dim, CANONICAL)


def kraus_to_evolution(kraus: KrausSet) -> EvolutionMatrix:
    """``sum_k conj(E_k) (x) E_k``; also valid for rectangular sets (returns a raw array)."""
    g = sum(np.kron(np.conj(op), op) for op in kraus.operators)
    if kraus.in_dim == kraus.out_dim:
        return EvolutionMatrix(g, kraus.dim)
    return g


def unitary_evolution(u) -> EvolutionMatrix:
    u = la.as_matrix(u, "unitary")
    return EvolutionMatrix(np.kron(np.conj(u), u), u.shape[0])


def evolve_density(g: EvolutionMatrix, rho) -> np.ndarray:
    rho = la.as_matrix(rho, "rho")
    if rho.shape != (g.dim, g.dim):
        raise DimensionError(f"rho of shape {rho.shape} does not fit G on dim {g.dim}")
    return la.unvec(g.matrix @ la.vec(rho))


def evolution_power(g: EvolutionMatrix, n: int) -> EvolutionMatrix:
    """``G**n``: ``n`` repetitions of a time-homogeneous Markov step."""
    if int(n) != n or n < 0:
        raise ValidationError(f"step count must be a non-negative integer, got {n}")
    return EvolutionMatrix(np.linalg.matrix_power(g.matrix, int(n)), g.dim)


# ---------------------------------------------------------------------------
# Unitary dilation
# ---------------------------------------------------------------------------


def kraus_to_dilation(kraus: KrausSet) -> UnitaryDilation:
    """Complete the stacked Kraus operators to a unitary.

    The remaining columns come from Gram-Schmidt on canonical basis vectors
    taken in ascending index order; candidates whose residual norm falls
    under 1e-8 are skipped.  The result is deterministic.
    """
    s = kraus.dim
    m = len(kraus)
    first = np.vstack(kraus.operators)
    if la._rel_fro(la.dagger(first) @ first - np.eye(s), np.eye(s)) > TOL_TP:
        raise ValidationError("stacked Kraus operators are not an isometry")
    n = m * s
    cols = [first[:, j] for j in range(s)]
    basis = np.array(cols).T if cols else np.zeros((n, 0))
    for idx in range(n):
        if len(cols) == n:
            break
        cand = la.ket(idx, n)
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            cand = cand - basis @ (la.dagger(basis) @ cand)
        norm = np.linalg.norm(cand)
        if norm < _GS_DROP:
            continue
        cols.append(cand / norm)
        basis = np.array(cols).T
    return UnitaryDilation(np.array(cols).T, s, m)


def dilation_to_kraus(u: UnitaryDilation) -> KrausSet:
    if not la.is_unitary(u.matrix):
        raise ValidationError("dilation is not unitary")
    ops = tuple(u.block(k, u.env_initial).copy() for k in range(u.env_dim))
    return KrausSet(ops)


# ---------------------------------------------------------------------------
# Choi state, bases, measurement equivalence
# ---------------------------------------------------------------------------


def choi_state(kraus: KrausSet) -> np.ndarray:
    """Output of ``I (x) E`` on the maximally entangled input (trace 1)."""
    s = kraus.dim
    phi = la.projector(la.max_entangled(s))
    eye = np.eye(s)
    out = np.zeros_like(phi)
    for op in kraus.operators:
        big = np.kron(eye, op)
        out += big @ phi @ la.dagger(big)
    return out


def pauli_basis(n_qubits: int = 1) -> list[np.ndarray]:
    """Orthonormal Pauli basis ``{I, X, Y, Z}/sqrt(2)`` and its tensor powers.

    ``Y`` is taken as ``-i sigma_y`` (a real matrix).  Multi-qubit elements
    are ordered lexicographically: II, IX, IY, IZ, XI, ...
    """
    one = [la.SIGMA_I, la.SIGMA_X, -1j * la.SIGMA_Y, la.SIGMA_Z]
    one = [m / np.sqrt(2) for m in one]
    return [la.tensor_product(*combo) for combo in product(one, repeat=n_qubits)]


PAULI_LABELS = "IXYZ"


def pauli_labels(n_qubits: int = 1) -> list[str]:
    return ["".join(c) for c in product(PAULI_LABELS, repeat=n_qubits)]


def basis_change_matrix(basis: Sequence[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    mats = [la.as_matrix(b, "basis matrix") for b in basis]
    s = mats[0].shape[0]
    if len(mats) != s * s or any(b.shape != (s, s) for b in mats):
        raise DimensionError(f"basis needs {s*s} matrices of shape {s}x{s}")
    u0 = np.column_stack([la.vec(b) for b in mats])
    # Tr(a_j a_k^H) is the conjugated Gram matrix of the vec columns
    gram = u0.T @ np.conj(u0)
    if np.max(np.abs(gram - np.eye(s * s))) > tol:
        raise ValidationError("basis is not orthonormal under Tr(a_j a_k^H)")
    return u0


def chi_change_basis(chi: ChiMatrix, basis: Sequence[np.ndarray]) -> np.ndarray:
    """Chi expressed in another orthonormal operator basis, ``U0^H chi U0``."""
    u0 = basis_change_matrix(basis)
    if u0.shape[0] != chi.matrix.shape[0]:
        raise DimensionError("basis size does not match chi")
    return la.dagger(u0) @ chi.matrix @ u0


def effective_measurement_check(kraus: KrausSet, c_in, c_m,
                                tol: float = 1e-10) -> tuple[float, float]:
    """Projective-measurement probability computed two ways.

    ``P`` comes from propagating ``|c_in><c_in|`` and projecting on ``c_m``;
    ``P_tilde`` projects the canonical chi onto ``conj(c_in) (x) c_m``.
    """
    c_in = np.asarray(c_in, dtype=complex).reshape(-1)
    c_m = np.asarray(c_m, dtype=complex).reshape(-1)
    for name, v in (("c_in", c_in), ("c_m", c_m)):
        if abs(np.linalg.norm(v) - 1) > tol:
            raise ValidationError(f"{name} is not normalized")
    rho_out = apply_channel(kraus, la.projector(c_in))
    p = float(np.real(np.conj(c_m) @ rho_out @ c_m))
    chi = kraus_to_chi(kraus).matrix
    eff = np.kron(np.conj(c_in), c_m)
    p_tilde = float(np.real(np.conj(eff) @ chi @ eff))
    return p, p_tilde


def pure_noise_channel(actual: EvolutionMatrix, ideal_unitary) -> ChiMatrix:
    """Chi of ``E o E0^-1`` where ``E0`` is conjugation by ``ideal_unitary``."""
    u = la.as_matrix(ideal_unitary, "ideal unitary")
    if not la.is_unitary(u, 1e-9):
        raise ValidationError("ideal operation is not unitary")
    if u.shape[0] != actual.dim:
        raise DimensionError("ideal unitary does not match the channel dimension")
    inverse = unitary_evolution(la.dagger(u))
    return evolution_to_chi(actual @ inverse)


def identity_chi(s: int, convention: str = NORMALIZED) -> ChiMatrix:
    chi = kraus_to_chi(KrausSet((np.eye(s),)))
    return chi if convention == CANONICAL else chi.normalized()


def random_channel(s: int, m: int, rng: np.random.Generator) -> KrausSet:
    """Random trace-preserving channel from a Haar-ish isometry (test helper)."""
    z = rng.normal(size=(m * s, s)) + 1j * rng.normal(size=(m * s, s))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausSet(tuple(q[k * s:(k + 1) * s] for k in range(m)))
