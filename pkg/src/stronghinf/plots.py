"""Figure rendering for the report path (headless, files only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .transfer import SweepTable

__all__ = ["plot_sweep", "plot_synth_traces"]


def plot_sweep(table: SweepTable, path, ta_value: float | None = None,
               norm_value: float | None = None, title: str = "") -> None:
    """Singular-value sweep with the asymptotic level as a dashed line."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    pos = table.omegas > 0
    logx = pos.sum() > 1 and table.omegas[pos].max() / table.omegas[pos].min() > 100
    for k in range(table.k):
        ax.plot(table.omegas, table.sigmas[:, k], lw=1.2,
                label=rf"$\sigma_{k + 1}(T(j\omega))$")
    if ta_value is not None and ta_value > 0:
        ax.axhline(ta_value, ls="--", color="k", lw=1.0,
                   label="asymptotic norm")
    if norm_value is not None:
        ax.axhline(norm_value, ls=":", color="C3", lw=1.0,
                   label="strong norm")
    if logx:
        ax.set_xscale("log")
        ax.set_xlim(table.omegas[pos].min(), table.omegas.max())
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel("singular values")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_synth_traces(result, path, title: str = "") -> None:
    """Objective value per accepted iterate, one line per finite start."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    plotted = False
    for t in result.traces:
        if not t.values:
            continue
        ax.plot(range(len(t.values)), t.values, lw=1.2, marker=".",
                ms=3, label=f"start {t.index}")
        plotted = True
    if not plotted:
        ax.text(0.5, 0.5, "no stabilizing start", ha="center", va="center",
                transform=ax.transAxes)
    ax.axhline(result.best_value, ls="--", color="k", lw=1.0,
               label=f"best = {result.best_value:.6f}")
    ax.set_xlabel("accepted iterate")
    ax.set_ylabel("strong H-infinity norm")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
