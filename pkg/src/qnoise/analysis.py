"""Gate-quality and entanglement analytics on chi-matrices."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .channels import (ChiMatrix, KrausSet, NORMALIZED, choi_state, identity_chi,
                       kraus_to_chi)
from .errors import DimensionError, ValidationError
from .noise import depolarizing_channel, phase_flip_kraus

ZERO_NEGATIVITY = 1e-10


# ---------------------------------------------------------------------------
# Fidelity
# ---------------------------------------------------------------------------


def _normalized_matrix(chi) -> tuple[np.ndarray, int]:
    """Trace-one matrix from a ChiMatrix or a raw array.

    Raw arrays are accepted when the trace is unambiguously 1 or ``s``.
    """
    if isinstance(chi, ChiMatrix):
        return chi.normalized().matrix, chi.dim
    m = la.as_matrix(chi, "chi")
    s = int(round(math.sqrt(m.shape[0])))
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1) <= 1e-6:
        return m, s
    if abs(tr - s) <= 1e-6:
        return m / s, s
    raise ValidationError(f"chi trace {tr} matches neither 1 nor s={s}")


def fidelity(chi0, chi) -> float:
    """``(Tr sqrt(sqrt(chi0) chi sqrt(chi0)))**2`` on trace-normalized matrices."""
    a, sa = _normalized_matrix(chi0)
    b, sb = _normalized_matrix(chi)
    if a.shape != b.shape:
        raise DimensionError("chi-matrices have different dimensions")
    for m in (a, b):
        if abs(np.trace(m) - 1) > 1e-8:
            raise ValidationError("fidelity needs unit-trace chi-matrices")
    r = la.matrix_sqrt_psd(a, tol=1e-8)
    inner = r @ b @ r
    w = la.psd_eigvals(0.5 * (inner + la.dagger(inner)), tol=1e-8)[0]
    f = float(np.sum(np.sqrt(w)) ** 2)
    return min(max(f, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Phase-flip code
# ---------------------------------------------------------------------------

BELL_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
BELL_PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)
BELL_PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)


def chi_ideal() -> ChiMatrix:
    return ChiMatrix(la.projector(BELL_PHI_PLUS), 2, NORMALIZED)


def chi_noise(p: float) -> ChiMatrix:
    """Normalized chi of a single phase flip with probability ``p``."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = (1 - 2 * p) / 2
    return ChiMatrix(m, 2, NORMALIZED)


def chi_code(p: float) -> ChiMatrix:
    """Normalized chi of the corrected logical qubit under independent phase flips."""
    ok = 1 - 3 * p ** 2 + 2 * p ** 3
    bad = 3 * p ** 2 - 2 * p ** 3
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[0, 3] = m[3, 0] = m[3, 3] = ok / 2
    m[1, 1] = m[1, 2] = m[2, 1] = m[2, 2] = bad / 2
    return ChiMatrix(m, 2, NORMALIZED)


def _cnot(n: int, control: int, target: int) -> np.ndarray:
    dim = 2 ** n
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[control]:
            bits[target] ^= 1
        j = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        u[j, i] = 1
    return u


def _toffoli(n: int, controls: Sequence[int], target: int) -> np.ndarray:
    dim = 2 ** n
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        if all(bits[c] for c in controls):
            bits[target] ^= 1
        j = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        u[j, i] = 1
    return u


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def phase_flip_code_channel(p: float) -> KrausSet:
    """Effective one-qubit channel of the three-qubit phase-flip code.

    Circuit: encode with two CNOTs onto ``|00>`` ancillas, Hadamard on all
    three, an independent phase flip on each qubit, Hadamard again, decode
    with the same CNOTs, correct with a Toffoli controlled by the ancillas,
    and discard the ancillas.
    """
    if not 0 <= p <= 1:
        raise ValidationError("p must lie in [0, 1]")
    h3 = la.tensor_product(HADAMARD, HADAMARD, HADAMARD)
    encode = _cnot(3, 0, 2) @ _cnot(3, 0, 1)
    decode = _cnot(3, 0, 2) @ _cnot(3, 0, 1)
    correct = _toffoli(3, (1, 2), 0)
    flips = phase_flip_kraus(p).operators
    # isometry: data qubit -> data (x) |00>
    iso = np.kron(np.eye(2), la.ket(0, 4).reshape(4, 1))
    ops = []
    for e0, e1, e2 in product(flips, repeat=3):
        err = la.tensor_product(e0, e1, e2)
        k = correct @ decode @ h3 @ err @ h3 @ encode @ iso  # 8 x 2
        k4 = k.reshape(2, 4, 2)
        for anc in range(4):
            op = k4[:, anc, :]
            if np.any(np.abs(op) > 0):
                ops.append(op.copy())
    return KrausSet(tuple(ops))


def phase_flip_code(p: float) -> tuple[ChiMatrix, ChiMatrix]:
    """Closed-form and circuit-simulated chi of the corrected channel."""
    simulated = ChiMatrix(choi_state(phase_flip_code_channel(p)), 2, NORMALIZED)
    return chi_code(p), simulated


# ---------------------------------------------------------------------------
# Negativity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    """Bipartition of a multi-factor state; ``transposed`` is the side that gets transposed."""

    kind: str
    dims: tuple
    transposed: tuple

    @classmethod
    def ancilla_vs_physical(cls, n_qubits: int = 2) -> "SplitSpec":
        return cls("ancilla_vs_physical", (2,) * (2 * n_qubits), tuple(range(n_qubits)))

    @classmethod
    def channel_vs_channel(cls) -> "SplitSpec":
        # reference copy and carrier of qubit 1 versus those of qubit 2
        return cls("channel_vs_channel", (2, 2, 2, 2), (0, 2))

    @classmethod
    def reference(cls, s: int) -> "SplitSpec":
        """Reference copy versus channel output for a ``s``-dimensional Choi state."""
        return cls("ancilla_vs_physical", (s, s), (0,))

    @classmethod
    def general(cls, dims: Sequence[int], transposed: Iterable[int]) -> "SplitSpec":
        dims = la.check_dims(dims)
        sub = tuple(sorted(set(int(i) for i in transposed)))
        if not sub or len(sub) == len(dims) or any(i < 0 or i >= len(dims) for i in sub):
            raise DimensionError("transposed subset must be a proper non-empty subset")
        return cls("general", dims, sub)

    @classmethod
    def named(cls, name: str, dim: int) -> "SplitSpec":
        """Split by name for a ``dim``-dimensional Choi state of qubit carriers."""
        if name == "channel_vs_channel":
            if dim != 4:
                raise ValidationError("channel_vs_channel split needs a two-qubit operation")
            return cls.channel_vs_channel()
        if name == "ancilla_vs_physical":
            n = int(round(math.log2(dim)))
            if 2 ** n == dim:
                return cls.ancilla_vs_physical(n)
            return cls.reference(dim)
        raise ValidationError(f"unknown split {name!r}")


def negativity(rho, split: SplitSpec) -> float:
    """Sum of the magnitudes of the negative partial-transpose eigenvalues."""
    if isinstance(rho, ChiMatrix):
        m = rho.normalized().matrix
    else:
        m = la.as_matrix(rho, "rho")
    la.check_dims(split.dims, m.shape[0])
    pt = la.partial_transpose(m, split.dims, split.transposed)
    w = la.herm_eig(pt)[0]
    # eigenvalues at rounding level carry no entanglement
    cutoff = w.size * np.finfo(float).eps * max(abs(w[0]), abs(w[-1]))
    return float(0.0 - np.sum(w[w < -cutoff]))


def partial_transpose_first_split(chi) -> np.ndarray:
    """Explicit bit-index form of the transpose of qubits 1 and 2 of four."""
    chi = la.as_matrix(chi)
    out = np.empty_like(chi)
    for j1, j2, j3, j4, k1, k2, k3, k4 in product((0, 1), repeat=8):
        out[8 * k1 + 4 * k2 + 2 * j3 + j4, 8 * j1 + 4 * j2 + 2 * k3 + k4] = \
            chi[8 * j1 + 4 * j2 + 2 * j3 + j4, 8 * k1 + 4 * k2 + 2 * k3 + k4]
    return out


def partial_transpose_second_split(chi) -> np.ndarray:
    """Explicit bit-index form of the transpose of qubits 1 and 3 of four."""
    chi = la.as_matrix(chi)
    out = np.empty_like(chi)
    for j1, j2, j3, j4, k1, k2, k3, k4 in product((0, 1), repeat=8):
        out[8 * k1 + 4 * j2 + 2 * k3 + j4, 8 * j1 + 4 * k2 + 2 * j3 + k4] = \
            chi[8 * j1 + 4 * j2 + 2 * j3 + j4, 8 * k1 + 4 * k2 + 2 * k3 + k4]
    return out


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepResult:
    param: str
    grid: np.ndarray
    values: np.ndarray
    metric: str
    gate: str = ""
    split: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise ValidationError("grid and values differ in length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValidationError("sweep grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("sweep produced non-finite values")

    def rows(self):
        for x, y in zip(self.grid, self.values):
            yield x, y, self.metric, self.gate, self.split


def _pool_map(fn, items, jobs: int | None):
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def depolarized_choi(s: int, p: float) -> ChiMatrix:
    return depolarizing_channel(np.eye(s), p)[1].normalized()


def depolarizing_negativity_sweep(s_values: Iterable[int], p_grid: Sequence[float],
                                  jobs: int | None = None) -> list[SweepResult]:
    """Reference-split negativity of the depolarized identity channel over ``p``."""
    p_grid = np.asarray(p_grid, dtype=float)
    if p_grid.size == 0:
        raise ValidationError("empty p grid")
    if np.any((p_grid < 0) | (p_grid > 1)):
        raise ValidationError("p grid must lie in [0, 1]")
    out = []
    for s in s_values:
        s = int(s)
        if not 2 <= s <= 10:
            raise ValidationError(f"s must be in 2..10, got {s}")
        split = SplitSpec.reference(s)
        vals = _pool_map(lambda p: negativity(depolarized_choi(s, p), split), p_grid, jobs)
        out.append(SweepResult("p", p_grid, np.array(vals), "negativity",
                               gate=f"depolarizing_s{s}", split="ancilla_vs_physical",
                               meta={"s": s}))
    return out


def critical_noise(result: SweepResult, zero: float = ZERO_NEGATIVITY) -> float:
    """Zero crossing of a piecewise-linear decaying curve.

    The line through the last two positive points is extended to zero; it
    must land between the last positive and the first zero grid point.
    """
    x, y = result.grid, result.values
    pos = np.flatnonzero(y > zero)
    zer = np.flatnonzero(y <= zero)
    if not pos.size or not zer.size:
        raise ValidationError("curve does not cross zero on this grid")
    first_zero = zer[zer > pos[0]][0]
    last_pos = first_zero - 1
    if last_pos < 1:
        return float(x[first_zero])
    x0, x1, y0, y1 = x[last_pos - 1], x[last_pos], y[last_pos - 1], y[last_pos]
    root = x1 - y1 * (x1 - x0) / (y1 - y0)
    slack = 1e-9 * (x[first_zero] - x[last_pos])
    if not x[last_pos] - slack <= root <= x[first_zero] + slack:
        raise ValidationError("extrapolated crossing falls outside its bracket")
    return float(min(max(root, x[last_pos]), x[first_zero]))


def entanglement_dynamics(run, split: SplitSpec | str = "ancilla_vs_physical",
                          source: str = "chi") -> SweepResult:
    """Negativity of ``chi(t)`` (or the pure-noise ``chi_tilde(t)``) along a run."""
    if source not in ("chi", "chi_tilde"):
        raise ValidationError("source must be 'chi' or 'chi_tilde'")
    mats = run.chi if source == "chi" else run.chi_tilde
    if isinstance(split, str):
        split = SplitSpec.named(split, run.gate.comp_dim)
    times, vals = [], []
    for t, chi in zip(run.times, mats):
        if chi is None:
            continue
        times.append(t)
        vals.append(negativity(chi, split))
    metric = "negativity" if source == "chi" else "negativity_tilde"
    return SweepResult("t", np.array(times), np.array(vals), metric,
                       gate=run.gate.name, split=split.kind)


def fidelity_trajectory(run, reference: str = "ideal") -> SweepResult:
    """Fidelity of each ``chi(t)`` to the noiseless chi at the same time, or of
    ``chi_tilde(t)`` to the identity channel (``reference='identity'``)."""
    times, vals = [], []
    c = run.gate.comp_dim
    ident = identity_chi(c)
    for t, chi, tilde in zip(run.times, run.chi, run.chi_tilde):
        if reference == "identity":
            if tilde is None:
                continue
            vals.append(fidelity(ident, tilde))
        else:
            u = run.gate.ideal_unitary(t)
            if u is None:
                continue
            vals.append(fidelity(kraus_to_chi(KrausSet((u,))), chi))
        times.append(t)
    metric = "fidelity" if reference == "ideal" else "fidelity_tilde"
    return SweepResult("t", np.array(times), np.array(vals), metric, gate=run.gate.name)


def ecc_table(p_grid: Sequence[float], jobs: int | None = None) -> list[tuple]:
    """Rows ``(p, F_noise, F_code, F_code_simulated)``."""
    ideal = chi_ideal()

    def row(p):
        analytic, simulated = phase_flip_code(p)
        return (float(p), fidelity(ideal, chi_noise(p)), fidelity(ideal, analytic),
                fidelity(ideal, simulated))

    return _pool_map(row, p_grid, jobs)
