"""Weighted global quantities, interface budgets and the per-step ledger.

Overlap cells (center in ``[b, c]``) count with weight ``1 - eta`` on ``U``
and ``eta`` on ``V``; all other cells count fully. With these weights the
entropy rate of the coupled operator telescopes to

.. code::

    dS/dt = (boundary terms at a and d) - B_b - B_c - D

where ``B_b`` and ``B_c`` are the discrete interface budgets (zero without
interface dissipation) and ``D >= 0`` collects the interior penalties.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from overset1d.geometry import GridField, OversetGeometry1D
from overset1d.spatial import (
    BoundaryCondition,
    OversetRHS,
    PointPenalty,
    RHSEvaluation,
    check_state,
    single_domain_faces_and_rhs,
)
from overset1d.systems import ConservationLawSystem, _numerical_entropy_flux

Array = np.ndarray


# {{{ weighted totals


def cell_weights(geom: OversetGeometry1D, grid: GridField) -> Array:
    in_overlap = geom.in_overlap(grid.centers)
    if grid.domain_id == "U":
        return np.where(in_overlap, 1.0 - geom.eta, 1.0)
    if grid.domain_id == "V":
        return np.where(in_overlap, geom.eta, 1.0)
    return np.ones(grid.n_cells)


def total_entropy(
    sys: ConservationLawSystem, geom: OversetGeometry1D, grid_u: GridField, grid_v: GridField
) -> float:
    """Weighted total entropy of both grids."""
    total = 0.0
    for g in (grid_u, grid_v):
        check_state(sys, g.values, g.domain_id)
        total += float(np.sum(cell_weights(geom, g) * sys.entropy(g.values)) * g.dx)
    return total


def conserved_totals(
    sys: ConservationLawSystem, geom: OversetGeometry1D, grid_u: GridField, grid_v: GridField
) -> Array:
    """Weighted totals of each conserved component."""
    total = np.zeros(sys.nvars)
    for g in (grid_u, grid_v):
        check_state(sys, g.values, g.domain_id)
        total += (cell_weights(geom, g) @ g.values) * g.dx
    return total


# }}}


# {{{ semi-discrete identities


@dataclass(frozen=True)
class IdentityCheck:
    """Measured and predicted rates of the weighted entropy and conserved
    totals for one right-hand-side evaluation."""

    entropy_rate: float
    entropy_rate_predicted: float
    conservation_rate: Array
    conservation_rate_predicted: Array
    boundary_entropy: float
    B_b: float = 0.0
    B_c: float = 0.0
    D: float = 0.0
    #: magnitude used to normalize the residuals
    entropy_scale: float = 1.0
    conservation_scale: Array = field(default_factory=lambda: np.ones(1))

    @property
    def entropy_rate_residual(self) -> float:
        return abs(self.entropy_rate - self.entropy_rate_predicted)

    @property
    def conservation_rate_residual(self) -> Array:
        return np.abs(self.conservation_rate - self.conservation_rate_predicted)


def boundary_entropy_terms(sys, q_left, flux_left, q_right, flux_right) -> float:
    """Entropy entering through the faces at ``a`` and ``d``.

    For a boundary face flux ``F`` next to the cell state ``q`` this is
    ``w(q) F - psi(q)`` at ``a`` and its negative at ``d``.
    """
    w_l = sys.entropy_variables(q_left)
    w_r = sys.entropy_variables(q_right)
    left = float(w_l @ flux_left - sys.potential(q_left))
    right = float(w_r @ flux_right - sys.potential(q_right))
    return left - right


def interface_budgets(rhs: OversetRHS, ev: RHSEvaluation) -> tuple[float, float]:
    """Discrete interface budgets at ``b`` and ``c``.

    Each is the entropy-flux mismatch of the two grids' interface fluxes,
    weighted by ``beta``, plus the entropy of the lifted correction and of the
    interface dissipation. The two-point flux jump condition makes the
    first two cancel.
    """
    sys = rhs.system
    eta = rhs.eta
    w_u = cell_weights(rhs.geom, rhs.grid_u)
    w_v = cell_weights(rhs.geom, rhs.grid_v)

    ib = ev.interface_b
    jl = ib.cell
    B_b = eta * float(
        _numerical_entropy_flux(sys, ib.outer, ib.q_u) - _numerical_entropy_flux(sys, ib.outer, ib.q_v)
    ) + w_u[jl] * float(sys.entropy_variables(ev.q_u[jl]) @ ib.correction)

    ic = ev.interface_c
    jr = ic.cell
    B_c = (1.0 - eta) * float(
        _numerical_entropy_flux(sys, ic.q_u, ic.outer) - _numerical_entropy_flux(sys, ic.q_v, ic.outer)
    ) - w_v[jr] * float(sys.entropy_variables(ev.q_v[jr]) @ ic.correction)

    if ev.dissipation:
        B_b += _quadratic(sys, ev.dissipation[0], eta)
        B_c += _quadratic(sys, ev.dissipation[1], eta)

    return B_b, B_c


def _quadratic(sys: ConservationLawSystem, pp: PointPenalty, eta: float) -> float:
    """``scale (1 - eta) dw^T Sigma_u dw`` for the co-located pair on the U
    cell."""
    u, v = pp.pair_u
    dw = sys.entropy_variables(u) - sys.entropy_variables(v)
    return pp.scale * (1.0 - eta) * float(dw @ pp.sigma_u @ dw)


def interior_dissipation(rhs: OversetRHS, ev: RHSEvaluation) -> float:
    """``D = (1/M) sum_m (1 - eta) [[w]]^T Sigma_u [[w]]``."""
    return float(sum(_quadratic(rhs.system, pp, rhs.eta) for pp in ev.interior))


def verify_semidiscrete_identities(
    rhs: OversetRHS,
    q_u: Array,
    q_v: Array,
    t: float = 0.0,
    ev: RHSEvaluation | None = None,
) -> IdentityCheck:
    """Compare the weighted entropy and conservation rates of the coupled
    operator with their predictions from boundary, interface and penalty
    terms."""
    if ev is None:
        ev = rhs.evaluate(q_u, q_v, t)
    sys = rhs.system

    weights = (cell_weights(rhs.geom, rhs.grid_u), cell_weights(rhs.geom, rhs.grid_v))
    states = (ev.q_u, ev.q_v)
    rates = (ev.dq_u, ev.dq_v)
    dxs = (rhs.grid_u.dx, rhs.grid_v.dx)

    ent_terms = [
        om * np.sum(sys.entropy_variables(q) * dq, axis=-1) * dx
        for om, q, dq, dx in zip(weights, states, rates, dxs)
    ]
    cons_terms = [(om[:, None] * dq) * dx for om, dq, dx in zip(weights, rates, dxs)]

    entropy_rate = float(sum(np.sum(e) for e in ent_terms))
    conservation_rate = sum(np.sum(c, axis=0) for c in cons_terms)

    boundary = boundary_entropy_terms(sys, ev.q_u[0], ev.faces_u[0], ev.q_v[-1], ev.faces_v[-1])
    B_b, B_c = interface_budgets(rhs, ev)
    D = interior_dissipation(rhs, ev)

    return IdentityCheck(
        entropy_rate=entropy_rate,
        entropy_rate_predicted=boundary - B_b - B_c - D,
        conservation_rate=conservation_rate,
        conservation_rate_predicted=ev.faces_u[0] - ev.faces_v[-1],
        boundary_entropy=boundary,
        B_b=B_b,
        B_c=B_c,
        D=D,
        entropy_scale=max(1.0, float(sum(np.sum(np.abs(e)) for e in ent_terms))),
        conservation_scale=np.maximum(1.0, sum(np.sum(np.abs(c), axis=0) for c in cons_terms)),
    )


def verify_single_domain_identities(
    sys: ConservationLawSystem, grid: GridField, bc: BoundaryCondition, t: float = 0.0
) -> IdentityCheck:
    """Same checks for the single-domain operator; only boundary terms."""
    faces, dq = single_domain_faces_and_rhs(sys, grid, bc, t)
    q = grid.values

    ent = np.sum(sys.entropy_variables(q) * dq, axis=-1) * grid.dx
    cons = dq * grid.dx
    boundary = boundary_entropy_terms(sys, q[0], faces[0], q[-1], faces[-1])

    return IdentityCheck(
        entropy_rate=float(np.sum(ent)),
        entropy_rate_predicted=boundary,
        conservation_rate=np.sum(cons, axis=0),
        conservation_rate_predicted=faces[0] - faces[-1],
        boundary_entropy=boundary,
        entropy_scale=max(1.0, float(np.sum(np.abs(ent)))),
        conservation_scale=np.maximum(1.0, np.sum(np.abs(cons), axis=0)),
    )


# }}}


# {{{ ledger


@dataclass(frozen=True)
class BudgetLedger:
    """One ledger row."""

    t: float
    S_bar: float
    conserved_totals: Array
    B_b: float
    B_c: float
    D: float
    entropy_rate_residual: float
    conservation_rate_residual: Array

    def __post_init__(self):
        if self.D < -1.0e-14:
            raise ValueError(f"interior dissipation must be non-negative: D = {self.D}")

    @classmethod
    def record(cls, rhs: OversetRHS, q_u: Array, q_v: Array, t: float) -> BudgetLedger:
        gu = rhs.grid_u.with_values(q_u)
        gv = rhs.grid_v.with_values(q_v)
        check = verify_semidiscrete_identities(rhs, q_u, q_v, t)
        return cls(
            t=t,
            S_bar=total_entropy(rhs.system, rhs.geom, gu, gv),
            conserved_totals=conserved_totals(rhs.system, rhs.geom, gu, gv),
            B_b=check.B_b,
            B_c=check.B_c,
            D=check.D,
            entropy_rate_residual=check.entropy_rate_residual,
            conservation_rate_residual=check.conservation_rate_residual,
        )

    def as_row(self) -> list[float]:
        return [
            self.t,
            self.S_bar,
            *self.conserved_totals,
            self.B_b,
            self.B_c,
            self.D,
            self.entropy_rate_residual,
            *self.conservation_rate_residual,
        ]


def ledger_header(nvars: int) -> list[str]:
    return (
        ["t", "S_bar"]
        + [f"conserved_{i}" for i in range(nvars)]
        + ["B_b", "B_c", "D", "entropy_rate_residual"]
        + [f"conservation_rate_residual_{i}" for i in range(nvars)]
    )


def _fmt(x: float) -> str:
    return "%.17g" % x


def emit_ledger(rows: Sequence[BudgetLedger], path: str | Path, nvars: int) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ledger_header(nvars))
        for row in rows:
            writer.writerow([_fmt(x) for x in row.as_row()])
    return path


def read_ledger(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        data = [[float(x) for x in row] for row in reader]
    return header, np.array(data, dtype=np.float64).reshape(-1, len(header))


def emit_state(grid: GridField, path: str | Path) -> Path:
    """Cell centers and values, columns ``x, q_0, ..., q_{p-1}``."""
    path = Path(path)
    nvars = grid.values.shape[1]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x"] + [f"q_{i}" for i in range(nvars)])
        for x, q in zip(grid.centers, grid.values):
            writer.writerow([_fmt(x)] + [_fmt(v) for v in q])
    return path


def read_rows(path: str | Path) -> Iterable[dict[str, float]]:
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            yield {k: float(v) for k, v in row.items()}


# }}}
