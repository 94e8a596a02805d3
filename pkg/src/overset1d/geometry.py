"""Overset geometry, uniform cell-centered grids and cross-grid evaluation.

The 1D overset layout is ``a < b < c < d`` with the two overlapping
subdomains ``U = [a, c]`` and ``V = [b, d]`` and the overlap ``O = [b, c]``.
Each subdomain carries a uniform grid of cell averages. The interfaces sit on
grid faces: ``c`` is the right face of ``U`` and ``b`` the left face of ``V``.

The grids are *aligned* when both have the same spacing and ``b`` (resp.
``c``) is also a face of ``U`` (resp. ``V``). Then every overlap cell of one
grid coincides with a cell of the other and cross-grid evaluation at cell
centers is exact (``exact_node`` mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

Array = np.ndarray

#: relative tolerance (in units of the grid spacing) for node coincidence
NODE_TOLERANCE = 1.0e-12
#: relative tolerance for face alignment checks
ALIGNMENT_TOLERANCE = 1.0e-9


class InterpolationError(ValueError):
    pass


@dataclass(frozen=True)
class OversetGeometry1D:
    a: float
    b: float
    c: float
    d: float
    eta: float = 0.5

    def __post_init__(self):
        if not (self.a < self.b < self.c < self.d):
            raise ValueError(
                "interface coordinates must satisfy a < b < c < d: "
                f"got {self.a}, {self.b}, {self.c}, {self.d}"
            )
        if not (0.0 < self.eta < 1.0):
            raise ValueError(f"eta must lie in (0,1): got {self.eta}")

    @property
    def span_u(self) -> tuple[float, float]:
        return (self.a, self.c)

    @property
    def span_v(self) -> tuple[float, float]:
        return (self.b, self.d)

    @property
    def overlap(self) -> tuple[float, float]:
        return (self.b, self.c)

    def in_overlap(self, x: Array) -> Array:
        """Membership by cell center, closed interval ``[b, c]``."""
        x = np.asarray(x)
        return (x >= self.b) & (x <= self.c)


@dataclass(frozen=True)
class GridField:
    """Cell averages of one subdomain's state on a uniform grid.

    .. attribute:: values

        Array of shape ``(n_cells, p)``.
    """

    domain_id: Literal["U", "V", "single"]
    x_left: float
    x_right: float
    values: Array = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"values must have shape (n_cells, p): {values.shape}")
        if not self.x_right > self.x_left:
            raise ValueError(f"degenerate span [{self.x_left}, {self.x_right}]")
        object.__setattr__(self, "values", values)

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def centers(self) -> Array:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> Array:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    def with_values(self, values: Array) -> GridField:
        return replace(self, values=values)

    def cell_index(self, x: float) -> int:
        """Index of the cell containing *x*; points on a face go right.

        The small bias makes the choice identical for two grids whose faces
        coincide up to round-off.
        """
        if not (self.x_left <= x <= self.x_right):
            raise InterpolationError(
                f"x = {x} outside grid {self.domain_id} span "
                f"[{self.x_left}, {self.x_right}]"
            )
        j = math.floor((x - self.x_left) / self.dx + ALIGNMENT_TOLERANCE)
        return min(max(j, 0), self.n_cells - 1)


@dataclass(frozen=True)
class InterpolationOperator:
    """Evaluation of a grid's cell averages at arbitrary points.

    ``exact_node`` returns a donor cell value unmodified and fails if the
    query point is not a cell center; ``lagrange`` fits a degree ``order``
    polynomial through the ``order + 1`` nearest cell centers.
    """

    order: int = 1
    mode: Literal["exact_node", "lagrange"] = "exact_node"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"interpolation order must be positive: {self.order}")
        if self.mode not in ("exact_node", "lagrange"):
            raise ValueError(f"unknown interpolation mode: '{self.mode}'")


def lagrange_weights(nodes: Array, x: float) -> Array:
    nodes = np.asarray(nodes, dtype=np.float64)
    weights = np.ones_like(nodes)
    for i, xi in enumerate(nodes):
        for k, xk in enumerate(nodes):
            if k != i:
                weights[i] *= (x - xk) / (xi - xk)
    return weights


def evaluate_at(grid: GridField, x: float, interp: InterpolationOperator) -> Array:
    """Evaluate the state of *grid* at the point *x*."""
    if not (grid.x_left <= x <= grid.x_right):
        raise InterpolationError(
            f"x = {x} outside grid {grid.domain_id} span [{grid.x_left}, {grid.x_right}]"
        )

    dx = grid.dx
    s = (x - grid.x_left) / dx - 0.5

    if interp.mode == "exact_node":
        j = int(round(s))
        if not (0 <= j < grid.n_cells) or abs(s - j) * dx > NODE_TOLERANCE * dx + 1.0e-15 * abs(x):
            raise InterpolationError(
                f"x = {x} is not a cell center of grid {grid.domain_id} "
                "(exact_node interpolation requires aligned grids)"
            )
        return grid.values[j]

    npoints = interp.order + 1
    if npoints > grid.n_cells:
        raise InterpolationError(
            f"order {interp.order} needs {npoints} cells, grid has {grid.n_cells}"
        )
    start = int(math.floor(s - 0.5 * (npoints - 1) + 0.5))
    start = min(max(start, 0), grid.n_cells - npoints)

    idx = np.arange(start, start + npoints)
    weights = lagrange_weights(grid.x_left + (idx + 0.5) * dx, x)
    return weights @ grid.values[idx]


def build_grids(
    geom: OversetGeometry1D,
    n_u: int,
    n_v: int,
    values_u: Array | None = None,
    values_v: Array | None = None,
    nvars: int = 1,
) -> tuple[GridField, GridField]:
    """Uniform grids covering ``[a, c]`` and ``[b, d]``."""
    if n_u < 4 or n_v < 4:
        raise ValueError(f"each grid needs at least 4 cells: n_u={n_u}, n_v={n_v}")

    if values_u is None:
        values_u = np.zeros((n_u, nvars))
    if values_v is None:
        values_v = np.zeros((n_v, nvars))

    u = GridField("U", geom.a, geom.c, values_u)
    v = GridField("V", geom.b, geom.d, values_v)
    if u.n_cells != n_u or v.n_cells != n_v:
        raise ValueError("value arrays do not match the requested cell counts")

    return u, v


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) < ALIGNMENT_TOLERANCE * max(1.0, abs(x))


def is_aligned(geom: OversetGeometry1D, n_u: int, n_v: int) -> bool:
    """Whether grids of *n_u* and *n_v* cells are aligned (see module docs)."""
    dx_u = (geom.c - geom.a) / n_u
    dx_v = (geom.d - geom.b) / n_v
    if abs(dx_u - dx_v) > ALIGNMENT_TOLERANCE * dx_u:
        return False
    return _is_integer((geom.b - geom.a) / dx_u) and _is_integer((geom.c - geom.b) / dx_u)


def aligned_sizes(geom: OversetGeometry1D, n_overlap: int) -> tuple[int, int]:
    """Cell counts ``(n_u, n_v)`` of aligned grids with *n_overlap* cells
    across ``[b, c]``.

    Raises if the interface coordinates are not commensurate with that
    spacing.
    """
    if n_overlap < 1:
        raise ValueError(f"n_overlap must be positive: {n_overlap}")

    dx = (geom.c - geom.b) / n_overlap
    n_left = (geom.b - geom.a) / dx
    n_right = (geom.d - geom.c) / dx
    if not (_is_integer(n_left) and _is_integer(n_right)):
        raise ValueError(
            f"no aligned grids with {n_overlap} overlap cells: "
            f"(b-a)/dx = {n_left}, (d-c)/dx = {n_right} are not integers"
        )

    return int(round(n_left)) + n_overlap, n_overlap + int(round(n_right))


def find_aligned_sizes(geom: OversetGeometry1D, n_u_target: int, max_overlap: int = 10_000) -> tuple[int, int]:
    """Aligned cell counts whose ``n_u`` is closest to *n_u_target*."""
    best = None
    for m in range(1, max_overlap + 1):
        try:
            n_u, n_v = aligned_sizes(geom, m)
        except ValueError:
            continue
        if best is None or abs(n_u - n_u_target) < abs(best[0] - n_u_target):
            best = (n_u, n_v)
        if n_u > n_u_target:
            break

    if best is None:
        raise ValueError("interface coordinates admit no aligned grids")
    return best
