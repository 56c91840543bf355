"""Matplotlib figure rendering for run and sweep reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from .analysis import LivenessSeries
from .sweep import OUTCOME_COLORS, SweepResult

__all__ = ["save_liveness_figure", "save_phase_figure"]


def save_liveness_figure(series: LivenessSeries, path, burn_in: int = None) -> None:
    """Mean liveness vs generation, with a histogram of the post-burn-in means."""
    gens = np.asarray(series.generations)
    means = np.asarray(series.mean_a)
    fig, (ax, axh) = plt.subplots(
        1, 2, figsize=(9, 4), gridspec_kw={"width_ratios": [3, 1]}, constrained_layout=True
    )
    ax.plot(gens, means, lw=0.8, color="tab:red")
    if burn_in is not None and 0 < burn_in < gens[-1]:
        ax.axvline(burn_in, color="gray", ls="--", lw=0.8, label=f"burn-in = {burn_in}")
        ax.legend(frameon=False)
    ax.set_xlabel("generation")
    ax.set_ylabel(r"mean liveness $\langle a \rangle$")
    sel = means[gens >= (burn_in or 0)]
    if sel.size >= 2 and np.ptp(sel) > 0:
        axh.hist(sel, bins=min(40, max(10, sel.size // 50)), orientation="horizontal",
                 color="tab:red", alpha=0.7)
    axh.set_xlabel("count")
    axh.set_ylabel(r"$\langle a \rangle$ after burn-in")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_phase_figure(result: SweepResult, path) -> None:
    """Categorical phase diagram of sweep outcomes over (a14, a23)."""
    labels = list(OUTCOME_COLORS)
    index = {label: i for i, label in enumerate(labels)}
    nx, ny = len(result.a14_values), len(result.a23_values)
    grid = np.zeros((ny, nx), dtype=int)
    present = set()
    for i in range(ny):
        for j in range(nx):
            label = result.points[i * nx + j].label
            grid[i, j] = index[label]
            present.add(label)
    cmap = ListedColormap([tuple(c / 255 for c in OUTCOME_COLORS[l]) for l in labels])
    a14, a23 = result.a14_values, result.a23_values
    dx = (a14[1] - a14[0]) / 2 if nx > 1 else 0.005
    dy = (a23[1] - a23[0]) / 2 if ny > 1 else 0.005
    fig, ax = plt.subplots(figsize=(6.5, 5.5), constrained_layout=True)
    ax.imshow(
        grid,
        origin="lower",
        cmap=cmap,
        vmin=-0.5,
        vmax=len(labels) - 0.5,
        interpolation="nearest",
        extent=(a14[0] - dx, a14[-1] + dx, a23[0] - dy, a23[-1] + dy),
        aspect="auto",
    )
    ax.set_xlabel(r"$a_1 = a_4$")
    ax.set_ylabel(r"$a_2 = a_3$")
    handles = [
        Patch(color=tuple(c / 255 for c in OUTCOME_COLORS[l]), label=l)
        for l in labels
        if l in present
    ]
    ax.legend(handles=handles, loc="center left", bbox_to_anchor=(1.02, 0.5), frameon=False)
    fig.savefig(path, dpi=150)
    plt.close(fig)
