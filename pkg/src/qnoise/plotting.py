"""SVG figures for sweeps, error-correction curves and chi matrices.

matplotlib is imported lazily so the numeric pipeline never needs it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (6.0, 3.7),
    "svg.hashsalt": "qnoise",  # stable element ids
    "svg.fonttype": "none",
}


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    _pyplot().close(fig)
    return path


def plot_sweeps(results, path, title: str = "", xlabel: str | None = None,
                ylabel: str | None = None) -> Path:
    """One line per :class:`SweepResult`, labelled by gate and split."""
    plt = _pyplot()
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for r in results:
            label = " / ".join(x for x in (r.gate, r.split, r.metric) if x)
            ax.plot(r.grid, r.values, label=label)
        if results:
            ax.set_xlabel(xlabel or results[0].param)
            ax.set_ylabel(ylabel or results[0].metric)
        ax.set_title(title)
        ax.grid(alpha=0.3)
        if len(results) > 1:
            ax.legend()
        fig.tight_layout()
        return _save(fig, path)


def plot_ecc(rows: Sequence[tuple], path) -> Path:
    p, f_noise, f_code, f_sim = (np.array(c) for c in zip(*rows))
    plt = _pyplot()
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(p, f_noise, label="no correction")
        ax.plot(p, f_code, label="phase-flip code")
        ax.plot(p, f_sim, "o", ms=3, mfc="none", label="code, circuit simulation")
        ax.set_xlabel("p")
        ax.set_ylabel("fidelity")
        ax.grid(alpha=0.3)
        ax.legend()
        fig.tight_layout()
        return _save(fig, path)


def plot_chi(chi, path, title: str = "") -> Path:
    """Heatmaps of the real and imaginary parts of a chi-matrix."""
    m = chi.matrix
    lim = float(np.max(np.abs(m))) or 1.0
    plt = _pyplot()
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(7.0, 3.4))
        for ax, part, name in zip(axes, (m.real, m.imag), ("Re", "Im")):
            im = ax.imshow(part, cmap="RdBu_r", vmin=-lim, vmax=lim)
            ax.set_title(f"{name} chi")
            ax.set_xticks(range(m.shape[0]))
            ax.set_yticks(range(m.shape[0]))
        fig.colorbar(im, ax=axes, shrink=0.8)
        if title:
            fig.suptitle(title)
        return _save(fig, path)
