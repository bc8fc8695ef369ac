"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Two conventions
are fixed here and relied upon everywhere else:

* ``vec`` stacks columns: column ``j`` of an ``s x s`` matrix occupies entries
  ``j*s .. (j+1)*s - 1`` of the vector.
* In a tensor product the leftmost factor is the slowest-varying index, so for
  four qubits the first one carries weight 8 in the basis-state index.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NotCompletelyPositiveError, ValidationError

TOL_HERM = 1e-10
TOL_UNIT = 1e-10
TOL_PSD = 1e-10

# Pauli matrices in the usual (unnormalized) form
SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def _as_square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices, leftmost factor slowest."""
    if not ops:
        raise ValidationError("tensor_product needs at least one factor")
    return reduce(np.kron, (as_matrix(o) for o in ops))


def vec(a) -> np.ndarray:
    """Column-stack a square matrix into a vector of length ``s**2``."""
    a = _as_square(a)
    return a.reshape(-1, order="F")


def unvec(v, rows: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`.

    ``rows`` selects the row count for rectangular results; by default the
    result is square.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    if rows is None:
        rows = int(round(np.sqrt(v.size)))
        if rows * rows != v.size:
            raise DimensionError(f"length {v.size} is not a perfect square")
    if v.size % rows:
        raise DimensionError(f"length {v.size} not divisible by {rows} rows")
    return v.reshape((rows, v.size // rows), order="F")


# ---------------------------------------------------------------------------
# Subsystem operations
# ---------------------------------------------------------------------------


def check_dims(dims: Sequence[int], total: int | None = None) -> tuple[int, ...]:
    """Validate a subsystem dimension profile and return it as a tuple."""
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DimensionError("dimension profile is empty")
    if any(d < 2 for d in dims):
        raise DimensionError(f"every subsystem needs dimension >= 2, got {dims}")
    if total is not None and int(np.prod(dims)) != total:
        raise DimensionError(f"dims {dims} multiply to {int(np.prod(dims))}, expected {total}")
    return dims


def _subset(indices: Iterable[int], n: int, what: str) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if any(i < 0 or i >= n for i in idx):
        raise DimensionError(f"{what} indices {idx} out of range for {n} subsystems")
    return idx


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems retain their original relative order.
    """
    m = _as_square(m)
    dims = check_dims(dims, m.shape[0])
    n = len(dims)
    keep = _subset(keep, n, "keep")
    if not keep:
        raise DimensionError("keep must name at least one subsystem")
    t = m.reshape(dims + dims)
    # trace the discarded axes from the highest index down so positions stay valid
    k = n
    for i in reversed(range(n)):
        if i not in keep:
            t = np.trace(t, axis1=i, axis2=i + k)
            k -= 1
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def partial_transpose(m, dims: Sequence[int], transposed: Iterable[int]) -> np.ndarray:
    """Transpose the listed subsystems, leaving the rest untouched."""
    m = _as_square(m)
    dims = check_dims(dims, m.shape[0])
    n = len(dims)
    sub = _subset(transposed, n, "transposed")
    axes = list(range(2 * n))
    for i in sub:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return m.reshape(dims + dims).transpose(axes).reshape(m.shape)


def embed(op, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Lift ``op`` acting on subsystems ``targets`` to the full space ``dims``.

    ``targets`` may be in any order; ``op`` is interpreted with its own factor
    order following ``targets``.
    """
    dims = check_dims(dims)
    n = len(dims)
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise DimensionError(f"bad target list {targets}")
    tdims = [dims[t] for t in targets]
    op = _as_square(op, "op")
    if op.shape[0] != int(np.prod(tdims)):
        raise DimensionError(f"op of size {op.shape[0]} does not match targets {tdims}")
    rest = [i for i in range(n) if i not in targets]
    full = np.kron(op, np.eye(int(np.prod([dims[i] for i in rest])) if rest else 1))
    # current factor order is targets + rest; permute back to 0..n-1
    order = targets + rest
    cur_dims = [dims[i] for i in order]
    perm = [order.index(i) for i in range(n)]
    t = full.reshape(cur_dims + cur_dims)
    t = t.transpose(perm + [p + n for p in perm])
    total = int(np.prod(dims))
    return t.reshape(total, total)


# ---------------------------------------------------------------------------
# Spectral tools
# ---------------------------------------------------------------------------


def _rel_fro(diff: np.ndarray, ref: np.ndarray) -> float:
    nref = np.linalg.norm(ref)
    nd = np.linalg.norm(diff)
    if nref == 0.0:
        return float(nd)
    return float(nd / nref)


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return _rel_fro(m - dagger(m), m) <= tol


def is_unitary(m, tol: float = TOL_UNIT) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    eye = np.eye(m.shape[0])
    return _rel_fro(dagger(m) @ m - eye, eye) <= tol


def is_psd(m, tol: float = TOL_PSD) -> bool:
    if not is_hermitian(m):
        return False
    return bool(herm_eig(m)[0][-1] >= -tol)


def herm_eig(m, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    values : ndarray
        Real eigenvalues in non-increasing order.
    vectors : ndarray
        Matching orthonormal eigenvectors as columns, so that
        ``m == vectors @ diag(values) @ vectors^H``.
    """
    m = _as_square(m)
    if not is_hermitian(m, tol):
        raise ValidationError("matrix is not Hermitian within tolerance",
                              deviation=_rel_fro(m - dagger(m), m))
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return w[::-1].copy(), v[:, ::-1].copy()


def matrix_exp_unitary(h, t: float = 1.0) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    h = _as_square(h, "hamiltonian")
    if t == 0:
        if not is_hermitian(h):
            raise ValidationError("generator is not Hermitian")
        return np.eye(h.shape[0], dtype=complex)
    w, v = herm_eig(h)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def psd_eigvals(m, tol: float = TOL_PSD) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a PSD matrix with rounding-level eigenvalues set to zero.

    Eigenvalues in ``[-tol, 0)`` and positive ones below ``n * eps * max|w|``
    are indistinguishable from zero and returned as exactly 0, which keeps
    square roots of rank-deficient matrices from picking up ``sqrt(1e-17)``
    noise.
    """
    w, v = herm_eig(m)
    if w.size and w[-1] < -tol:
        raise NotCompletelyPositiveError("matrix has a negative eigenvalue",
                                         eigenvalue=float(w[-1]))
    cutoff = w.size * np.finfo(float).eps * max(abs(w[0]), abs(w[-1]), 0.0)
    w = np.where(w > cutoff, w, 0.0)
    return w, v


def matrix_sqrt_psd(m, tol: float = TOL_PSD) -> np.ndarray:
    """Positive semidefinite square root; eigenvalues in ``[-tol, 0)`` clamp to zero."""
    w, v = psd_eigvals(m, tol)
    return (v * np.sqrt(w)) @ dagger(v)


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, np.conj(v))


def max_entangled(dim: int) -> np.ndarray:
    """``(1/sqrt(d)) sum_j |j>|j>`` as a vector of length ``d**2``."""
    return np.eye(dim, dtype=complex).reshape(-1) / np.sqrt(dim)
