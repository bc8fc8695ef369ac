"""Noise models: relaxation Kraus sets, T1/T2 bookkeeping, dilation Hamiltonians.

Time parameterizations used below:

* amplitude damping: ``gamma = 1 - exp(-t/T1)``
* pure dephasing: ``sqrt(1 - gamma) = exp(-t/T2_pure)``
* either one as a unitary coupling to an environment qubit at angle ``theta``
  with ``gamma = sin(theta)**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from . import linalg as la
from .channels import ChiMatrix, KrausSet, CANONICAL
from .errors import ValidationError

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def _check_prob(x: float, name: str, hi: float = 1.0) -> float:
    x = float(x)
    if not (0.0 <= x <= hi):
        raise ValidationError(f"{name} must lie in [0, {hi}], got {x}")
    return x


@dataclass(frozen=True)
class RelaxationParams:
    """Amplitude (T1) and total dephasing (T2) times of one carrier.

    ``T2 <= 2*T1`` is enforced.  ``T2 == 2*T1`` means no pure dephasing
    (``T2_pure`` is infinite).
    """

    T1: float
    T2: float

    def __post_init__(self):
        t1, t2 = float(self.T1), float(self.T2)
        if not (t1 > 0 and t2 > 0) or math.isnan(t1) or math.isnan(t2):
            raise ValidationError(f"T1 and T2 must be positive, got T1={t1}, T2={t2}")
        if t2 > 2 * t1 * (1 + 1e-12):
            raise ValidationError(f"T2={t2} exceeds the physical bound 2*T1={2 * t1}")
        object.__setattr__(self, "T1", t1)
        object.__setattr__(self, "T2", t2)

    @property
    def T2_pure(self) -> float:
        denom = 2 * self.T1 - self.T2
        if denom <= 0:
            return math.inf
        return 2 * self.T1 * self.T2 / denom


# ---------------------------------------------------------------------------
# Single-qubit Kraus sets
# ---------------------------------------------------------------------------


def dephasing_kraus(gamma: float) -> KrausSet:
    g = _check_prob(gamma, "gamma")
    e0 = np.diag([1.0, math.sqrt(1 - g)]).astype(complex)
    e1 = np.diag([0.0, math.sqrt(g)]).astype(complex)
    return KrausSet((e0, e1))


def phase_flip_kraus(p: float) -> KrausSet:
    p = _check_prob(p, "p")
    return KrausSet((math.sqrt(1 - p) * la.SIGMA_I, math.sqrt(p) * la.SIGMA_Z))


def amplitude_kraus(gamma: float) -> KrausSet:
    g = _check_prob(gamma, "gamma")
    e0 = np.diag([1.0, math.sqrt(1 - g)]).astype(complex)
    e1 = np.array([[0.0, math.sqrt(g)], [0.0, 0.0]], dtype=complex)
    return KrausSet((e0, e1))


def gamma_from_phase_flip(p: float) -> float:
    """Dephasing strength equivalent to a phase flip with probability ``p <= 1/2``."""
    p = _check_prob(p, "p", 0.5)
    return 1.0 - (1.0 - 2.0 * p) ** 2


def phase_flip_from_gamma(gamma: float) -> float:
    g = _check_prob(gamma, "gamma")
    return (1.0 - math.sqrt(1.0 - g)) / 2.0


def phase_flip_probability(t: float, T2_pure: float) -> float:
    if t < 0:
        raise ValidationError("time must be non-negative")
    return (1.0 - math.exp(-t / T2_pure)) / 2.0


def t2_pure_from_phase_flip(p: float, t: float) -> float:
    p = _check_prob(p, "p", 0.5)
    if p == 0:
        return math.inf
    if p == 0.5:
        return 0.0
    return -t / math.log(1.0 - 2.0 * p)


def amplitude_gamma(t: float, T1: float) -> float:
    if t < 0:
        raise ValidationError("time must be non-negative")
    return -math.expm1(-t / T1)


def dephasing_gamma(t: float, T2_pure: float) -> float:
    if t < 0:
        raise ValidationError("time must be non-negative")
    return -math.expm1(-2.0 * t / T2_pure)


def relaxation_kraus(t: float, params: RelaxationParams) -> KrausSet:
    """Amplitude damping followed by pure dephasing over time ``t``."""
    amp = amplitude_kraus(amplitude_gamma(t, params.T1))
    deph = dephasing_kraus(dephasing_gamma(t, params.T2_pure))
    return KrausSet(tuple(d @ a for d in deph for a in amp))


def relaxation_analytic(rho, t: float, params: RelaxationParams) -> np.ndarray:
    """Closed-form qubit state after combined T1/T2 relaxation for time ``t``."""
    rho = la.as_matrix(rho, "rho")
    if rho.shape != (2, 2):
        raise ValidationError("relaxation_analytic acts on a single qubit")
    if t < 0:
        raise ValidationError("time must be non-negative")
    decay1 = math.exp(-t / params.T1)
    decay2 = math.exp(-t / params.T2)
    excited = rho[1, 1] * decay1
    return np.array([[1.0 - excited, rho[0, 1] * decay2],
                     [rho[1, 0] * decay2, excited]], dtype=complex)


# ---------------------------------------------------------------------------
# Fictitious time
# ---------------------------------------------------------------------------


def gamma_from_theta(theta: float) -> float:
    return math.sin(theta) ** 2


def theta_from_gamma(gamma: float) -> float:
    return math.asin(math.sqrt(_check_prob(gamma, "gamma")))


def fictitious_time(kind: str, t: float, params: RelaxationParams) -> float:
    """Coupling angle that reproduces relaxation of duration ``t``."""
    if kind == "amplitude":
        g = amplitude_gamma(t, params.T1)
    elif kind == "phase":
        T2p = params.T2_pure
        g = 0.0 if math.isinf(T2p) else dephasing_gamma(t, T2p)
    else:
        raise ValidationError(f"unknown relaxation kind {kind!r}")
    return theta_from_gamma(g)


def real_time(kind: str, theta: float, params: RelaxationParams) -> float:
    """Inverse of :func:`fictitious_time`; ``theta = pi/2`` maps to ``inf``."""
    if not 0 <= theta <= math.pi / 2:
        raise ValidationError("theta must lie in [0, pi/2]")
    c2 = math.cos(theta) ** 2
    if c2 <= 0.0 or theta == math.pi / 2:
        return math.inf
    if kind == "amplitude":
        return -params.T1 * math.log(c2)
    if kind == "phase":
        return -params.T2_pure / 2.0 * math.log(c2)
    raise ValidationError(f"unknown relaxation kind {kind!r}")


# ---------------------------------------------------------------------------
# Interaction Hamiltonians
# ---------------------------------------------------------------------------


def annihilation(dim: int) -> np.ndarray:
    """Truncated oscillator lowering operator ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def relaxation_hamiltonians(sys_dim: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Environment-qubit couplings for amplitude and phase relaxation.

    The environment qubit is the first tensor factor.

    Returns
    -------
    h_amp : ndarray
        ``i (b^H (x) a - b (x) a^H)``
    h_phase : ndarray
        ``(b + b^H) (x) a^H a``
    """
    if sys_dim not in (2, 3):
        raise ValidationError(f"relaxation couplings defined for dims 2 and 3, got {sys_dim}")
    a = annihilation(sys_dim)
    b = annihilation(2)
    h_amp = 1j * (np.kron(la.dagger(b), a) - np.kron(b, la.dagger(a)))
    h_phase = np.kron(b + la.dagger(b), la.dagger(a) @ a)
    return h_amp, h_phase


# ---------------------------------------------------------------------------
# Depolarizing channel and level reduction
# ---------------------------------------------------------------------------


def depolarizing_channel(u, p: float) -> tuple[KrausSet, ChiMatrix]:
    """Unitary ``u`` that is replaced by the maximally mixed state with probability ``p``.

    Built from ``e_U = vec(u)/sqrt(s)`` and an orthonormal basis of its
    complement (the unit-eigenvalue eigenvectors of ``I - e_U e_U^H``).
    """
    u = la.as_matrix(u, "unitary")
    if not la.is_unitary(u):
        raise ValidationError("depolarizing channel needs a unitary")
    p = _check_prob(p, "p")
    s = u.shape[0]
    n = s * s
    e_u = la.vec(u) / math.sqrt(s)
    proj = np.eye(n) - np.outer(e_u, np.conj(e_u))
    w, v = la.herm_eig(proj)
    complement = v[:, w > 0.5]
    cols = [math.sqrt(1.0 - (n - 1) * p / n) * e_u]
    if p > 0:
        cols += list((math.sqrt(p / n) * complement).T)
    e = np.column_stack(cols)
    # e e^H has unit trace; the Kraus operators carry the extra sqrt(s)
    chi = ChiMatrix(s * (e @ la.dagger(e)), s, CANONICAL)
    ops = tuple(la.unvec(math.sqrt(s) * e[:, k]) for k in range(e.shape[1]))
    return KrausSet(ops), chi


def qutrit_reduction() -> KrausSet:
    """Map a qutrit onto a qubit, identifying level 2 with level 1."""
    e0 = np.array([[1, 0, 0], [0, 1, 0]], dtype=complex)
    e1 = np.array([[0, 0, 0], [0, 0, 1]], dtype=complex)
    return KrausSet((e0, e1))


# ---------------------------------------------------------------------------
# JSON-level spec
# ---------------------------------------------------------------------------

_NOISE_KINDS = {"dephasing", "phase_flip", "amplitude", "relaxation", "depolarizing"}


@dataclass(frozen=True)
class NoiseSpec:
    """Parsed noise description (see :func:`NoiseSpec.from_dict`)."""

    kind: str
    gamma: float | None = None
    p: float | None = None
    relaxation: tuple[RelaxationParams, ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "NoiseSpec":
        d = dict(d)
        kind = d.pop("kind", None)
        if kind not in _NOISE_KINDS:
            raise ValidationError(f"noise kind must be one of {sorted(_NOISE_KINDS)}, got {kind!r}")
        allowed = {"dephasing": {"gamma"}, "amplitude": {"gamma"}, "phase_flip": {"p"},
                   "depolarizing": {"p"}, "relaxation": {"T1", "T2", "per_qubit"}}[kind]
        extra = set(d) - allowed
        if extra:
            raise ValidationError(f"unexpected fields for {kind} noise: {sorted(extra)}")
        if kind in ("dephasing", "amplitude"):
            return cls(kind, gamma=_check_prob(d.get("gamma", math.nan), "gamma"))
        if kind in ("phase_flip", "depolarizing"):
            return cls(kind, p=_check_prob(d.get("p", math.nan), "p"))
        if "per_qubit" in d:
            if "T1" in d or "T2" in d:
                raise ValidationError("give either T1/T2 or per_qubit, not both")
            try:
                per = tuple(RelaxationParams(float(q["T1"]), float(q["T2"]))
                            for q in d["per_qubit"])
            except (KeyError, TypeError, ValueError):
                raise ValidationError("per_qubit entries need numeric T1 and T2") from None
            if not per:
                raise ValidationError("per_qubit list is empty")
            return cls(kind, relaxation=per)
        if "T1" not in d or "T2" not in d:
            raise ValidationError("relaxation noise needs T1 and T2")
        return cls(kind, relaxation=(RelaxationParams(d["T1"], d["T2"]),))

    def to_dict(self) -> dict:
        if self.kind in ("dephasing", "amplitude"):
            return {"kind": self.kind, "gamma": self.gamma}
        if self.kind in ("phase_flip", "depolarizing"):
            return {"kind": self.kind, "p": self.p}
        if len(self.relaxation) == 1:
            r = self.relaxation[0]
            return {"kind": self.kind, "T1": r.T1, "T2": r.T2}
        return {"kind": self.kind,
                "per_qubit": [{"T1": r.T1, "T2": r.T2} for r in self.relaxation]}

    def per_carrier(self, n: int) -> tuple[RelaxationParams, ...]:
        """Relaxation parameters for ``n`` carriers (a single entry is broadcast)."""
        if self.kind != "relaxation":
            raise ValidationError(f"{self.kind} noise has no per-carrier relaxation times")
        if len(self.relaxation) == 1:
            return self.relaxation * n
        if len(self.relaxation) != n:
            raise ValidationError(f"need relaxation times for {n} carriers, "
                                  f"got {len(self.relaxation)}")
        return self.relaxation

    def kraus(self, t: float | None = None, u=None) -> KrausSet:
        """Single-qubit Kraus set (depolarizing uses ``u``, identity by default)."""
        if self.kind == "dephasing":
            return dephasing_kraus(self.gamma)
        if self.kind == "amplitude":
            return amplitude_kraus(self.gamma)
        if self.kind == "phase_flip":
            return phase_flip_kraus(self.p)
        if self.kind == "depolarizing":
            return depolarizing_channel(np.eye(2) if u is None else u, self.p)[0]
        if t is None:
            raise ValidationError("relaxation noise needs a duration")
        return relaxation_kraus(t, self.per_carrier(1)[0])
