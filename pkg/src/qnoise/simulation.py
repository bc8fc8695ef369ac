"""Markovian time stepping of a noisy gate on the extended Choi system.

Layout of the extended state, slowest factor first::

    reference copy (computational dims) | physical carriers | environment qubits

Every physical carrier ``q`` owns two environment qubits: ``2q`` couples
through the amplitude-relaxation Hamiltonian, ``2q + 1`` through the
phase-relaxation one.  For two qubits this is the eight-qubit (256-dim)
layout; for the qutrit CZ the physical factor is six-dimensional.

A step applies ``exp(-i H_total dt)``, traces out the environment and
re-prepares it in ``|0...0>``.  The coupling strengths are ``theta/dt`` with
``theta`` the fictitious time of one step, so a noise-only step reproduces
exact T1 decay and pure dephasing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .channels import (ChiMatrix, EvolutionMatrix, KrausSet, NORMALIZED, evolution_to_chi,
                       kraus_to_evolution, pure_noise_channel, tp_deviation)
from .errors import TraceDriftError, ValidationError
from .gates import GateSpec
from .noise import NoiseSpec, RelaxationParams, fictitious_time, relaxation_hamiltonians

log = logging.getLogger(__name__)

DT_RANGE = (1e-4, 1e-2)
TRACE_DRIFT = 1e-8


def _noise_per_carrier(noise, n: int) -> tuple[RelaxationParams | None, ...]:
    if noise is None:
        return (None,) * n
    if isinstance(noise, RelaxationParams):
        return (noise,) * n
    if isinstance(noise, NoiseSpec):
        return noise.per_carrier(n)
    noise = tuple(noise)
    if len(noise) == 1:
        return noise * n
    if len(noise) != n:
        raise ValidationError(f"gate has {n} carriers but {len(noise)} noise entries")
    for item in noise:
        if item is not None and not isinstance(item, RelaxationParams):
            raise ValidationError("noise entries must be RelaxationParams or None")
    return noise


@dataclass(frozen=True)
class Layout:
    ref_dims: tuple
    phys_dims: tuple

    @property
    def env_dims(self) -> tuple:
        return (2,) * (2 * len(self.phys_dims))

    @property
    def dims(self) -> tuple:
        return self.ref_dims + self.phys_dims + self.env_dims

    @property
    def ref_dim(self) -> int:
        return int(np.prod(self.ref_dims))

    @property
    def phys_dim(self) -> int:
        return int(np.prod(self.phys_dims))

    @property
    def env_dim(self) -> int:
        return 2 ** len(self.env_dims)


def layout_for(gate: GateSpec) -> Layout:
    if gate.embedding is None:
        ref = tuple(gate.sys_dims)
    else:
        ref = (2,) * int(round(math.log2(gate.comp_dim)))
    return Layout(ref, tuple(gate.sys_dims))


def coupling_angles(params: RelaxationParams | None, dt: float) -> tuple[float, float]:
    """Per-step (amplitude, phase) coupling angles."""
    if params is None:
        return 0.0, 0.0
    return fictitious_time("amplitude", dt, params), fictitious_time("phase", dt, params)


def total_hamiltonian(gate: GateSpec, noise, dt: float) -> np.ndarray:
    """Gate Hamiltonian plus relaxation couplings on ``physical (x) environment``."""
    lay = layout_for(gate)
    per = _noise_per_carrier(noise, len(lay.phys_dims))
    n_phys = len(lay.phys_dims)
    dims = lay.phys_dims + lay.env_dims
    h = la.embed(gate.hamiltonian, dims, list(range(n_phys)))
    for q, params in enumerate(per):
        th_amp, th_phase = coupling_angles(params, dt)
        h_amp, h_phase = relaxation_hamiltonians(lay.phys_dims[q])
        env_amp = n_phys + 2 * q
        if th_amp:
            h = h + (th_amp / dt) * la.embed(h_amp, dims, [env_amp, q])
        if th_phase:
            h = h + (th_phase / dt) * la.embed(h_phase, dims, [env_amp + 1, q])
    return h


def build_initial_state(gate: GateSpec) -> np.ndarray:
    """Maximally entangled reference/physical pair with every environment qubit in ``|0>``."""
    lay = layout_for(gate)
    phi = la.max_entangled(lay.ref_dim)
    if gate.embedding is not None:
        phi = np.kron(np.eye(lay.ref_dim), gate.embedding) @ phi
    env0 = la.ket(0, lay.env_dim)
    return la.projector(np.kron(phi, env0))


def markovian_step(state, hamiltonian, dt: float, env_dim: int,
                   unitary: np.ndarray | None = None) -> np.ndarray:
    """One evolve / trace-out / re-prepare cycle on the full extended state.

    ``hamiltonian`` acts on the full space with the environment as the
    trailing ``env_dim``-dimensional block.  ``unitary`` may be passed to reuse
    a precomputed ``exp(-i H dt)``.
    """
    state = la.as_matrix(state, "state")
    n = state.shape[0]
    if n % env_dim:
        raise ValidationError("state size is not a multiple of the environment size")
    u = la.matrix_exp_unitary(hamiltonian, dt) if unitary is None else unitary
    if u.shape != state.shape:
        raise ValidationError("Hamiltonian and state sizes differ")
    out = u @ state @ la.dagger(u)
    s = n // env_dim
    reduced = np.trace(out.reshape(s, env_dim, s, env_dim), axis1=1, axis2=3)
    env0 = np.zeros((env_dim, env_dim), dtype=complex)
    env0[0, 0] = 1.0
    return np.kron(reduced, env0)


def step_kraus(gate: GateSpec, noise, dt: float) -> KrausSet:
    """Physical-system Kraus operators ``<k|U|0>`` of one Markovian step."""
    lay = layout_for(gate)
    u = la.matrix_exp_unitary(total_hamiltonian(gate, noise, dt), dt)
    p, e = lay.phys_dim, lay.env_dim
    blocks = u.reshape(p, e, p, e)[:, :, :, 0]
    ops = tuple(blocks[:, k, :].copy() for k in range(e))
    ops = tuple(op for op in ops if np.any(np.abs(op) > 0))
    return KrausSet(ops)


@dataclass
class SimulationRun:
    gate: GateSpec
    noise: tuple
    dt: float
    times: np.ndarray
    chi: list = field(default_factory=list)
    chi_tilde: list = field(default_factory=list)
    evolution: list = field(default_factory=list)


def _steps_for(times: Sequence[float], dt: float) -> list[int]:
    steps = []
    for t in times:
        n = int(round(t / dt))
        if t < 0 or abs(n * dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ValidationError(f"sample time {t} is not a whole number of steps of {dt}")
        steps.append(n)
    if any(b < a for a, b in zip(steps, steps[1:])):
        raise ValidationError("sample times must be non-decreasing")
    return steps


def check_dt(dt: float, t_oper: float) -> None:
    lo, hi = DT_RANGE
    if not (lo * t_oper * (1 - 1e-9) <= dt <= hi * t_oper * (1 + 1e-9)):
        raise ValidationError(f"dt={dt} outside [{lo}, {hi}] * t_oper")


def simulate(gate: GateSpec, noise=None, dt: float | None = None,
             sample_times: Sequence[float] | None = None,
             check_range: bool = True) -> SimulationRun:
    """Step the noisy gate and record the chi-matrix at each sample time.

    The reference copy never changes, so stepping the extended state is the
    same as composing the physical step channel; this routine does the latter
    with evolution matrices.  :func:`markovian_step` is the literal procedure
    on the full extended state and agrees with it.

    Returns
    -------
    SimulationRun
        Normalized chi at every sample time, plus the pure-noise chi
        (``None`` where the ideal operation is not unitary, e.g. mid-pulse
        for the qutrit CZ).
    """
    dt = 1e-3 * gate.t_oper if dt is None else float(dt)
    if dt <= 0:
        raise ValidationError("dt must be positive")
    if check_range:
        check_dt(dt, gate.t_oper)
    times = np.array([gate.t_oper] if sample_times is None else sample_times, dtype=float)
    if times.size == 0:
        raise ValidationError("no sample times given")
    steps = _steps_for(times, dt)
    lay = layout_for(gate)
    per = _noise_per_carrier(noise, len(lay.phys_dims))

    kraus = step_kraus(gate, per, dt)
    dev = tp_deviation(kraus.operators)
    if dev > TRACE_DRIFT:
        raise TraceDriftError("step channel does not preserve trace", deviation=dev)
    g_step = kraus_to_evolution(kraus).matrix
    p, c = lay.phys_dim, gate.comp_dim
    if gate.embedding is not None:
        g_in = np.kron(np.conj(gate.embedding), gate.embedding)
        g_out = kraus_to_evolution(gate.reduction)
    else:
        g_in = g_out = None

    run = SimulationRun(gate, per, dt, times)
    g_cur = np.eye(p * p, dtype=complex)
    done = 0
    log.info("simulating %s: %d steps of dt=%g", gate.name, steps[-1], dt)
    for t, n in zip(times, steps):
        for _ in range(n - done):
            g_cur = g_step @ g_cur
        done = n
        g = g_cur if g_in is None else g_out @ g_cur @ g_in
        ev = EvolutionMatrix(g, c)
        chi = evolution_to_chi(ev).normalized()
        drift = abs(np.trace(chi.matrix) - 1)
        if drift > TRACE_DRIFT:
            raise TraceDriftError("chi trace drifted", time=float(t), deviation=float(drift))
        ideal = gate.ideal_unitary(t)
        tilde = None if ideal is None else pure_noise_channel(ev, ideal).normalized()
        run.evolution.append(ev)
        run.chi.append(chi)
        run.chi_tilde.append(tilde)
    return run


def simulate_full(gate: GateSpec, noise, dt: float, n_steps: int) -> ChiMatrix:
    """Literal extended-state stepping for ``n_steps``; returns the normalized chi.

    Costly for large layouts; meant for cross-checking :func:`simulate`.
    """
    lay = layout_for(gate)
    per = _noise_per_carrier(noise, len(lay.phys_dims))
    h = np.kron(np.eye(lay.ref_dim), total_hamiltonian(gate, per, dt))
    u = la.matrix_exp_unitary(h, dt)
    state = build_initial_state(gate)
    for _ in range(n_steps):
        state = markovian_step(state, h, dt, lay.env_dim, unitary=u)
    n_ref = len(lay.ref_dims)
    n_sys = n_ref + len(lay.phys_dims)
    rho = la.partial_trace(state, lay.dims, range(n_sys))
    if gate.reduction is not None:
        red = KrausSet(tuple(np.kron(np.eye(lay.ref_dim), e) for e in gate.reduction.operators))
        rho = sum(e @ rho @ la.dagger(e) for e in red.operators)
    return ChiMatrix(rho, gate.comp_dim, NORMALIZED)
