r"""Semi-discrete right-hand sides.

Both subdomains use the same second-order finite-volume scheme: flux
differencing of cell averages with the entropy-conservative two-point flux at
every face,

.. math::

    \frac{d q_j}{dt} = -\frac{F_{j+1/2} - F_{j-1/2}}{\Delta x},
    \qquad F_{j+1/2} = f^{ec}(q_j, q_{j+1}).

Overset coupling
----------------

``b`` is the left face of ``V`` and ``c`` the right face of ``U``. Each grid
closes its interface face with the two-point flux against the other grid's
state in the ghost cell just beyond it::

    V at b:  f^ec(u(b - dx/2), v_0)
    U at c:  f^ec(u_N, v(c + dx/2))

That alone feeds each grid from the other but breaks the weighted
conservation and entropy balances, because the overlap is counted with
weights ``(1 - eta)`` on ``U`` and ``eta`` on ``V``. The interface penalties
restore them. At ``b`` the last ``U`` cell outside the overlap receives

.. math::

    -\frac{\eta}{\Delta x}\left(f^{ec}(u_L, v_0) - f^{ec}(u_L, u_0)\right)

and at ``c`` the first ``V`` cell outside the overlap receives

.. math::

    +\frac{1 - \eta}{\Delta x}\left(f^{ec}(u_N, v_R) - f^{ec}(v_N, v_R)\right),

where ``u_0, v_0`` (``u_N, v_N``) are the co-located first (last) overlap
cells. The weights are the interface ``beta`` values and the penalties vanish
when the two solutions agree, so the overset operator then reproduces the
single-domain operator bitwise. With the Tadmor jump condition the discrete
interface entropy terms cancel exactly; see
:func:`overset1d.diagnostics.interface_budgets`.

Interior penalties at points ``x^m`` and the interface dissipation ``kappa``
are lifted into the containing cells of both grids, as linear penalties on
the entropy variables with ``(1 - eta) Sigma_u = eta Sigma_v``. The
``kappa`` term is such a penalty placed in the first/last overlap cells with
``(1 - eta) Sigma_u = kappa I``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from overset1d.coupling import PenaltyConfig, beta
from overset1d.geometry import (
    GridField,
    InterpolationOperator,
    OversetGeometry1D,
    evaluate_at,
    is_aligned,
)
from overset1d.systems import AdmissibilityError, ConservationLawSystem

Array = np.ndarray
ReferenceSolution = Callable[[Array, float], Array]


class StateError(AdmissibilityError):
    """Admissibility loss in a grid during a right-hand-side evaluation."""

    def __init__(self, grid: str, err: AdmissibilityError, t: float | None = None):
        self.grid = grid
        self.t = t
        AdmissibilityError.__init__(self, err.constraint, err.index, err.value)
        where = f"grid {grid}, cell {err.index}"
        if t is not None:
            where += f", t = {t:.17g}"
        self.args = (f"{self.args[0]} [{where}]",)


def check_state(system: ConservationLawSystem, q: Array, grid: str, t: float | None = None) -> None:
    try:
        system.check_admissible(q)
    except AdmissibilityError as exc:
        raise StateError(grid, exc, t) from exc


@dataclass(frozen=True)
class BoundaryCondition:
    """Physical boundary treatment at ``a`` and ``d``.

    ``reflective_none`` closes the boundary face with the cell's own
    physical flux; it is meant for data whose support never reaches the
    boundary. ``dirichlet_exact`` evaluates *reference* at the ghost cell
    center and uses the two-point flux plus local Lax-Friedrichs dissipation
    ``lambda/2 (q_out - q_in)`` oriented along the outward normal.
    """

    kind: Literal["dirichlet_exact", "reflective_none"] = "reflective_none"
    reference: ReferenceSolution | None = field(default=None, compare=False)
    dissipation: bool = True

    def __post_init__(self):
        if self.kind not in ("dirichlet_exact", "reflective_none"):
            raise ValueError(f"unknown boundary condition: '{self.kind}'")
        if self.kind == "dirichlet_exact" and self.reference is None:
            raise ValueError("dirichlet_exact boundary condition needs a reference solution")


# {{{ building blocks


def interior_face_fluxes(system: ConservationLawSystem, q: Array) -> Array:
    return system.ec_flux(q[:-1], q[1:])


def flux_divergence(faces: Array, dx: float) -> Array:
    """Cell update ``-(F_{j+1/2} - F_{j-1/2}) / dx`` from ``n + 1`` face fluxes."""
    return -(faces[1:] - faces[:-1]) / dx


def interior_update(
    system: ConservationLawSystem,
    q: Array,
    dx: float,
    left_flux: Array | None = None,
    right_flux: Array | None = None,
) -> Array:
    """Flux-differencing update of one grid.

    The boundary faces default to the cells' own physical flux.
    """
    q = np.asarray(q, dtype=np.float64)
    check_state(system, q, "field")

    if left_flux is None:
        left_flux = system.flux(q[0])
    if right_flux is None:
        right_flux = system.flux(q[-1])

    faces = np.concatenate([left_flux[None, :], interior_face_fluxes(system, q), right_flux[None, :]])
    return flux_divergence(faces, dx)


def lift_physical_bc(
    system: ConservationLawSystem,
    bc: BoundaryCondition,
    q_inner: Array,
    x_face: float,
    dx: float,
    side: Literal["left", "right"],
    t: float,
) -> Array:
    """Face flux at the physical boundary face *x_face* of the cell holding
    *q_inner*."""
    if bc.kind == "reflective_none":
        return system.flux(q_inner)

    if side == "left":
        x_ghost = x_face - 0.5 * dx
    else:
        x_ghost = x_face + 0.5 * dx
    q_ref = np.asarray(bc.reference(np.array([x_ghost]), t), dtype=np.float64)[0]
    check_state(system, q_ref, f"reference ({side})", t)

    if side == "left":
        ql, qr = q_ref, q_inner
    else:
        ql, qr = q_inner, q_ref

    flux = system.ec_flux(ql, qr)
    if bc.dissipation:
        lam = max(float(system.max_wave_speed(ql)), float(system.max_wave_speed(qr)))
        flux = flux - 0.5 * lam * (qr - ql)

    return flux


def single_domain_rhs(
    system: ConservationLawSystem,
    grid: GridField,
    bc: BoundaryCondition,
    t: float,
    q: Array | None = None,
) -> Array:
    """Right-hand side of the original problem on ``[a, d]``."""
    return single_domain_faces_and_rhs(system, grid, bc, t, q)[1]


def single_domain_faces_and_rhs(system, grid, bc, t, q=None):
    q = grid.values if q is None else np.asarray(q, dtype=np.float64)
    check_state(system, q, grid.domain_id, t)

    dx = grid.dx
    faces = np.empty((q.shape[0] + 1, q.shape[1]))
    faces[0] = lift_physical_bc(system, bc, q[0], grid.x_left, dx, "left", t)
    faces[1:-1] = interior_face_fluxes(system, q)
    faces[-1] = lift_physical_bc(system, bc, q[-1], grid.x_right, dx, "right", t)

    return faces, flux_divergence(faces, dx)


# }}}


# {{{ overset operator


@dataclass
class InterfaceData:
    """States and penalty used at one interface during an evaluation.

    At ``b``, ``outer`` is the ``U`` state just outside the overlap and
    ``own``/``other`` are the co-located first overlap states of ``U``/``V``.
    At ``c``, ``outer`` is the ``V`` state just outside and ``own``/``other``
    are the last overlap states of ``U``/``V``.
    """

    side: Literal["B", "C"]
    outer: Array
    q_u: Array
    q_v: Array
    correction: Array
    #: cell index receiving the correction (in U at b, in V at c)
    cell: int


@dataclass
class PointPenalty:
    """One linear entropy-variable penalty lifted into both grids."""

    cell_u: int
    cell_v: int
    #: states at the U cell (own value, interpolated V value)
    pair_u: tuple[Array, Array]
    #: states at the V cell (interpolated U value, own value)
    pair_v: tuple[Array, Array]
    sigma_u: Array
    sigma_v: Array
    #: 1/M for interior points, 1 for the interface dissipation
    scale: float


@dataclass
class RHSEvaluation:
    t: float
    q_u: Array
    q_v: Array
    dq_u: Array
    dq_v: Array
    faces_u: Array
    faces_v: Array
    interface_b: InterfaceData
    interface_c: InterfaceData
    interior: list[PointPenalty] = field(default_factory=list)
    dissipation: list[PointPenalty] = field(default_factory=list)


@dataclass
class OversetRHS:
    """Semi-discrete operator of the coupled two-grid problem.

    *grid_u* and *grid_v* fix the discretization; their values are only
    templates. Call the instance with the current cell averages to get the
    time derivatives.
    """

    system: ConservationLawSystem
    geom: OversetGeometry1D
    grid_u: GridField
    grid_v: GridField
    penalties: PenaltyConfig | None = None
    interp: InterpolationOperator = field(default_factory=InterpolationOperator)
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)

    def __post_init__(self):
        g = self.geom
        if self.penalties is None:
            self.penalties = PenaltyConfig(eta=g.eta)
        tol = 1.0e-12 * (g.d - g.a)
        if abs(self.grid_u.x_left - g.a) > tol or abs(self.grid_u.x_right - g.c) > tol:
            raise ValueError("grid U must cover [a, c]")
        if abs(self.grid_v.x_left - g.b) > tol or abs(self.grid_v.x_right - g.d) > tol:
            raise ValueError("grid V must cover [b, d]")
        if abs(self.penalties.eta - g.eta) > 0.0:
            raise ValueError(
                f"penalty eta ({self.penalties.eta}) differs from geometry eta ({g.eta})"
            )

        self.aligned = is_aligned(g, self.grid_u.n_cells, self.grid_v.n_cells)
        if self.interp.mode == "exact_node" and not self.aligned:
            raise ValueError(
                "exact_node interpolation needs aligned grids: equal spacing with "
                "b and c on faces of both grids"
            )

        for x in self.penalties.interior_points:
            if not (g.b < x < g.c):
                raise ValueError(f"interior penalty point {x} outside the open overlap ({g.b}, {g.c})")

        dx_u = self.grid_u.dx
        dx_v = self.grid_v.dx

        # points where one grid is sampled by the other
        self._x_ghost_b = g.b - 0.5 * dx_v
        self._x_first_v = g.b + 0.5 * dx_v
        self._x_ghost_c = g.c + 0.5 * dx_u
        self._x_last_u = g.c - 0.5 * dx_u

        self._cell_outer_b = self.grid_u.cell_index(self._x_ghost_b)
        self._cell_first_u = self.grid_u.cell_index(self._x_first_v)
        self._cell_outer_c = self.grid_v.cell_index(self._x_ghost_c)
        self._cell_last_v = self.grid_v.cell_index(self._x_last_u)

        self._points = [
            (self.grid_u.cell_index(x), self.grid_v.cell_index(x), m)
            for m, x in enumerate(self.penalties.interior_points)
        ]

    @property
    def eta(self) -> float:
        return self.geom.eta

    def __call__(self, q_u: Array, q_v: Array, t: float = 0.0) -> tuple[Array, Array]:
        ev = self.evaluate(q_u, q_v, t)
        return ev.dq_u, ev.dq_v

    def evaluate(self, q_u: Array, q_v: Array, t: float = 0.0) -> RHSEvaluation:
        system = self.system
        q_u = np.asarray(q_u, dtype=np.float64)
        q_v = np.asarray(q_v, dtype=np.float64)
        check_state(system, q_u, "U", t)
        check_state(system, q_v, "V", t)

        # snapshot of both grids before any write
        gu = self.grid_u.with_values(q_u)
        gv = self.grid_v.with_values(q_v)

        u_ghost = evaluate_at(gu, self._x_ghost_b, self.interp)
        v_ghost = evaluate_at(gv, self._x_ghost_c, self.interp)

        faces_u = np.empty((q_u.shape[0] + 1, q_u.shape[1]))
        faces_u[0] = lift_physical_bc(system, self.bc, q_u[0], gu.x_left, gu.dx, "left", t)
        faces_u[1:-1] = interior_face_fluxes(system, q_u)
        faces_u[-1] = system.ec_flux(q_u[-1], v_ghost)

        faces_v = np.empty((q_v.shape[0] + 1, q_v.shape[1]))
        faces_v[0] = system.ec_flux(u_ghost, q_v[0])
        faces_v[1:-1] = interior_face_fluxes(system, q_v)
        faces_v[-1] = lift_physical_bc(system, self.bc, q_v[-1], gv.x_right, gv.dx, "right", t)

        ev = RHSEvaluation(
            t=t,
            q_u=q_u,
            q_v=q_v,
            dq_u=flux_divergence(faces_u, gu.dx),
            dq_v=flux_divergence(faces_v, gv.dx),
            faces_u=faces_u,
            faces_v=faces_v,
            interface_b=None,
            interface_c=None,
        )

        lift_interface(self, ev, gu, gv, u_ghost, v_ghost)
        lift_interior(self, ev, gu, gv)

        return ev


def lift_interface(
    rhs: OversetRHS,
    ev: RHSEvaluation,
    gu: GridField,
    gv: GridField,
    u_ghost: Array,
    v_ghost: Array,
) -> None:
    """Add the interface penalties (and the ``kappa`` dissipation) to
    ``ev.dq_u`` and ``ev.dq_v`` in place."""
    system = rhs.system
    eta = rhs.eta

    # at b: U pays for what V takes in through its boundary face
    u_first = evaluate_at(gu, rhs._x_first_v, rhs.interp)
    flux_own = system.ec_flux(u_ghost, u_first)
    flux_other = ev.faces_v[0]
    corr_b = beta("B", eta) * (flux_other - flux_own)
    ev.dq_u[rhs._cell_outer_b] -= corr_b / gu.dx
    ev.interface_b = InterfaceData(
        "B", outer=u_ghost, q_u=u_first, q_v=ev.q_v[0], correction=corr_b, cell=rhs._cell_outer_b
    )

    # at c: V's first outer cell receives what U gives off through its boundary face
    v_last = evaluate_at(gv, rhs._x_last_u, rhs.interp)
    flux_own = ev.faces_u[-1]
    flux_other = system.ec_flux(v_last, v_ghost)
    corr_c = beta("C", eta) * (flux_own - flux_other)
    ev.dq_v[rhs._cell_outer_c] += corr_c / gv.dx
    ev.interface_c = InterfaceData(
        "C", outer=v_ghost, q_u=ev.q_u[-1], q_v=v_last, correction=corr_c, cell=rhs._cell_outer_c
    )

    kappa = rhs.penalties.kappa
    if kappa > 0:
        eye = np.eye(system.nvars)
        sigma_u = kappa / (1.0 - eta) * eye
        sigma_v = kappa / eta * eye

        ev.dissipation = [
            _lift_point(rhs, ev, gu, gv, rhs._cell_first_u, 0, sigma_u, sigma_v, 1.0),
            _lift_point(rhs, ev, gu, gv, gu.n_cells - 1, rhs._cell_last_v, sigma_u, sigma_v, 1.0),
        ]


def lift_interior(rhs: OversetRHS, ev: RHSEvaluation, gu: GridField, gv: GridField) -> None:
    """Add the ``1/M``-scaled interior penalties to ``ev.dq_u`` and
    ``ev.dq_v`` in place. No-op without interior points."""
    cfg = rhs.penalties
    if not cfg.n_points:
        return

    scale = 1.0 / cfg.n_points
    ev.interior = [
        _lift_point(rhs, ev, gu, gv, ju, jv, cfg.sigma_u[m], cfg.sigma_v[m], scale)
        for ju, jv, m in rhs._points
    ]


def _lift_point(rhs, ev, gu, gv, ju, jv, sigma_u, sigma_v, scale):
    system = rhs.system

    u_at_u = ev.q_u[ju]
    v_at_u = evaluate_at(gv, float(gu.centers[ju]), rhs.interp)
    u_at_v = evaluate_at(gu, float(gv.centers[jv]), rhs.interp)
    v_at_v = ev.q_v[jv]

    dw_u = system.entropy_variables(u_at_u) - system.entropy_variables(v_at_u)
    dw_v = system.entropy_variables(v_at_v) - system.entropy_variables(u_at_v)

    ev.dq_u[ju] -= scale * (sigma_u @ dw_u) / gu.dx
    ev.dq_v[jv] -= scale * (sigma_v @ dw_v) / gv.dx

    return PointPenalty(
        cell_u=ju,
        cell_v=jv,
        pair_u=(u_at_u, v_at_u),
        pair_v=(u_at_v, v_at_v),
        sigma_u=sigma_u,
        sigma_v=sigma_v,
        scale=scale,
    )


# }}}
