"""Matplotlib renderings saved next to the delimited outputs.

The CSV files are the canonical artifacts; these figures are a convenience
view of the same rows and are rendered headlessly (Agg backend).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_trajectory",
    "render_rabi_sweep",
    "render_h2_curve",
    "render_pt_compare",
]

_DPI = 150


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_trajectory(trajectory, path: "Path | str", title: str = "trajectory") -> Path:
    fig, (ax_top, ax_bottom) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    n_params = trajectory.params.shape[1]
    for i in range(n_params):
        ax_top.plot(trajectory.times, trajectory.params[:, i], label=f"param_{i}")
    ax_top.set_ylabel("parameters")
    ax_top.grid(alpha=0.3)
    if n_params <= 6:
        ax_top.legend(fontsize=8)
    for name, series in trajectory.observables.items():
        ax_bottom.plot(trajectory.times, series, label=name)
    ax_bottom.set_xlabel("t")
    ax_bottom.set_ylabel("observables")
    ax_bottom.grid(alpha=0.3)
    ax_bottom.legend(fontsize=8)
    fig.suptitle(title)
    return _save(fig, Path(path))


def render_rabi_sweep(rows: list[list], omega21: float, path: "Path | str") -> Path:
    data = np.array([[r[0], r[1], r[2], r[3], r[4]] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(data[:, 0], data[:, 3], "-", color="tab:orange", label="p1 oracle")
    ax.plot(data[:, 0], data[:, 4], "-", color="tab:blue", label="p2 oracle")
    ax.plot(data[:, 0], data[:, 1], "o", ms=3.5, color="tab:orange", label="p1 variational")
    ax.plot(data[:, 0], data[:, 2], "o", ms=3.5, color="tab:blue", label="p2 variational")
    ax.axvline(omega21, color="gray", ls=":", lw=1, label="resonance")
    ax.set_xlabel("drive frequency")
    ax.set_ylabel("population")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, Path(path))


def render_h2_curve(rows: list[list], path: "Path | str") -> Path:
    labels = [r[0] for r in rows]
    try:
        x = np.array([float(l) for l in labels])
        ticks = None
    except ValueError:
        x = np.arange(len(labels), dtype=float)
        ticks = labels
    e_var = np.array([r[1] for r in rows], dtype=float)
    e_tipt2 = np.array([r[2] for r in rows], dtype=float)
    e_exact = np.array([r[3] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(x, e_exact, "k-", lw=1, label="exact")
    ax.plot(x, e_var, "o", color="tab:blue", ms=4, label="variational")
    ax.plot(x, e_tipt2, "s", color="tab:red", ms=4, mfc="none", label="order-2 perturbation")
    if ticks is not None:
        ax.set_xticks(x, ticks)
    ax.set_xlabel("row label")
    ax.set_ylabel("ground energy")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, Path(path))


def render_pt_compare(rows: list[list], path: "Path | str") -> Path:
    data = np.array(rows, dtype=float)
    fig, (ax_left, ax_right) = plt.subplots(1, 2, figsize=(9, 4))
    ax_left.plot(data[:, 0], data[:, 1], "k-", lw=1, label="exact")
    ax_left.plot(data[:, 0], data[:, 2], "--", color="tab:red", label="order 1")
    ax_left.plot(data[:, 0], data[:, 3], "-.", color="tab:blue", label="order 2")
    ax_left.set_xlabel("lambda")
    ax_left.set_ylabel("level energy")
    ax_left.grid(alpha=0.3)
    ax_left.legend(fontsize=8)
    positive = (data[:, 4] > 0) & (data[:, 5] > 0) & (data[:, 0] > 0)
    if np.any(positive):
        ax_right.loglog(data[positive, 0], data[positive, 4], "--o", ms=3, color="tab:red", label="|order 1 - exact|")
        ax_right.loglog(data[positive, 0], data[positive, 5], "-.s", ms=3, color="tab:blue", label="|order 2 - exact|")
    ax_right.set_xlabel("lambda")
    ax_right.set_ylabel("deviation")
    ax_right.grid(alpha=0.3, which="both")
    ax_right.legend(fontsize=8)
    return _save(fig, Path(path))
