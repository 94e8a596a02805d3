"""Figures written next to the CSV output (non-interactive Agg backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from overset1d.geometry import GridField, OversetGeometry1D
from overset1d.systems import ConservationLawSystem

Array = np.ndarray


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120)
    return path


def plot_solution(
    system: ConservationLawSystem,
    geom: OversetGeometry1D,
    grid_u: GridField,
    grid_v: GridField,
    path: str | Path,
    t: float = 0.0,
    exact: Callable[[Array, float], Array] | None = None,
) -> Path:
    """One panel per conserved component, both grids overlaid and the
    overlap shaded."""
    p = system.nvars
    fig = Figure(figsize=(7.0, 2.4 * p), layout="constrained")
    axes = fig.subplots(p, 1, sharex=True, squeeze=False)[:, 0]

    xs = np.linspace(geom.a, geom.d, 800) if exact is not None else None
    ref = exact(xs, t) if exact is not None else None

    for i, ax in enumerate(axes):
        ax.axvspan(geom.b, geom.c, color="0.92", zorder=0)
        if ref is not None:
            ax.plot(xs, ref[:, i], color="k", lw=0.8, label="exact")
        ax.plot(grid_u.centers, grid_u.values[:, i], ".", ms=3, label="U")
        ax.plot(grid_v.centers, grid_v.values[:, i], "x", ms=3, label="V")
        ax.set_ylabel(system.component_names[i])

    axes[0].set_title(f"{system.name}, t = {t:.4g}")
    axes[0].legend(loc="best", fontsize="small")
    axes[-1].set_xlabel("x")
    return _save(fig, path)


def plot_ledger(rows: Sequence, path: str | Path) -> Path:
    """Entropy change and identity residuals over time."""
    fig = Figure(figsize=(7.0, 5.0), layout="constrained")
    ax_s, ax_r = fig.subplots(2, 1, sharex=True)

    if rows:
        t = np.array([r.t for r in rows])
        s = np.array([r.S_bar for r in rows])
        ent = np.array([r.entropy_rate_residual for r in rows])
        cons = np.array([np.max(r.conservation_rate_residual) for r in rows])

        ax_s.plot(t, s - s[0])
        # exact zeros would vanish on a log axis
        floor = 1.0e-20
        ax_r.semilogy(t, np.maximum(ent, floor), label="entropy rate")
        ax_r.semilogy(t, np.maximum(cons, floor), label="conservation rate")
        ax_r.legend(loc="best", fontsize="small")

    ax_s.set_ylabel(r"$\bar S(t) - \bar S(t_1)$")
    ax_r.set_ylabel("identity residual")
    ax_r.set_xlabel("t")
    return _save(fig, path)


def plot_convergence(dx: Sequence[float], errors: Sequence[float], path: str | Path, order: int = 2) -> Path:
    fig = Figure(figsize=(5.0, 4.0), layout="constrained")
    ax = fig.subplots()

    dx = np.asarray(dx)
    errors = np.asarray(errors)
    ax.loglog(dx, errors, "o-", label="L2 error")
    ax.loglog(dx, errors[0] * (dx / dx[0]) ** order, "k--", lw=0.8, label=f"order {order}")
    ax.set_xlabel(r"$\Delta x$")
    ax.set_ylabel("error")
    ax.legend(loc="best")
    return _save(fig, path)
