"""Initial conditions and exact solutions of the shipped test problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from overset1d.systems import ConservationLawSystem

Array = np.ndarray


def bump(x: Array, center: float, radius: float) -> Array:
    """Compactly supported ``(1 - z^2)^4`` bump, ``z = (x - center)/radius``."""
    z = (np.asarray(x, dtype=np.float64) - center) / radius
    return np.where(np.abs(z) < 1.0, (1.0 - z * z) ** 4, 0.0)


def burgers_characteristics(u0: Callable[[Array], Array], x: Array, t: float, u_range: tuple[float, float]) -> Array:
    """Pre-shock Burgers solution: solve ``xi + u0(xi) t = x`` per point."""
    x = np.asarray(x, dtype=np.float64)
    if t == 0:
        return u0(x)

    umin, umax = u_range
    out = np.empty_like(x)
    for i, xi in np.ndenumerate(x):
        lo = xi - umax * t - 1.0e-14
        hi = xi - umin * t + 1.0e-14
        g = lambda s: s + float(u0(np.array(s))) * t - xi  # noqa: E731
        root = brentq(g, lo, hi, xtol=1.0e-15, rtol=4.0 * np.finfo(float).eps, maxiter=200)
        out[i] = float(u0(np.array(root)))
    return out


@dataclass(frozen=True)
class InitialCondition:
    name: str
    params: dict[str, float] = field(default_factory=dict)
    #: names of systems the condition applies to
    system: str = "burgers"

    def __call__(self, x: Array) -> Array:
        return PROBLEMS[self.name].state(self.params, np.asarray(x, dtype=np.float64), 0.0)

    @property
    def has_exact(self) -> bool:
        return PROBLEMS[self.name].exact

    def exact(self, x: Array, t: float) -> Array:
        if not self.has_exact:
            raise ValueError(f"initial condition '{self.name}' has no exact solution")
        return PROBLEMS[self.name].state(self.params, np.asarray(x, dtype=np.float64), t)


@dataclass(frozen=True)
class Problem:
    system: str
    defaults: dict[str, float]
    state: Callable[[dict, Array, float], Array]
    #: whether ``state`` is exact for ``t > 0``
    exact: bool


def _burgers_bump(p, x, t):
    u0 = lambda s: p["base"] + p["amplitude"] * bump(s, p["center"], p["radius"])  # noqa: E731
    lo, hi = sorted((p["base"], p["base"] + p["amplitude"]))
    return burgers_characteristics(u0, x, t, (lo, hi))[:, None]


def _burgers_sine(p, x, t):
    u0 = lambda s: p["base"] + p["amplitude"] * np.sin(2.0 * np.pi * p["wavenumber"] * s)  # noqa: E731
    a = abs(p["amplitude"])
    return burgers_characteristics(u0, x, t, (p["base"] - a, p["base"] + a))[:, None]


def _constant(p, x, t):
    return np.tile(np.asarray(p["state"], dtype=np.float64), (x.size, 1))


def _sw_pulse(p, x, t):
    h = p["h0"] + p["amplitude"] * bump(x, p["center"], p["radius"])
    return np.stack([h, np.zeros_like(h)], axis=-1)


def _sw_lake(p, x, t):
    return np.stack([np.full_like(x, p["h0"]), np.zeros_like(x)], axis=-1)


def _euler_primitive(p, rho, u, pr):
    gamma = p.get("gamma", 1.4)
    return np.stack([rho, rho * u, pr / (gamma - 1.0) + 0.5 * rho * u * u], axis=-1)


def _euler_density_pulse(p, x, t):
    # a contact wave: density advects with the uniform velocity
    rho = p["rho0"] + p["amplitude"] * bump(x - p["velocity"] * t, p["center"], p["radius"])
    return _euler_primitive(p, rho, np.full_like(x, p["velocity"]), np.full_like(x, p["pressure"]))


def _euler_vacuum(p, x, t):
    rho = np.where(np.abs(x - p["center"]) < p["radius"], 0.0, 1.0)
    return _euler_primitive(p, rho, np.zeros_like(x), np.full_like(x, p["pressure"]))


PROBLEMS: dict[str, Problem] = {
    "burgers_bump": Problem(
        "burgers", {"base": 0.1, "amplitude": 0.2, "center": 0.3, "radius": 0.25}, _burgers_bump, True
    ),
    "burgers_sine": Problem(
        "burgers", {"base": 0.0, "amplitude": 0.2, "wavenumber": 1.0}, _burgers_sine, True
    ),
    "constant": Problem("any", {"state": [1.0]}, _constant, True),
    "sw_lake_at_rest": Problem("shallow_water", {"h0": 1.0}, _sw_lake, True),
    "sw_pulse": Problem(
        "shallow_water", {"h0": 1.0, "amplitude": 0.05, "center": 0.5, "radius": 0.15}, _sw_pulse, False
    ),
    "euler_density_pulse": Problem(
        "euler",
        {"rho0": 1.0, "amplitude": 0.5, "velocity": 0.5, "pressure": 1.0, "center": 0.3, "radius": 0.15},
        _euler_density_pulse,
        True,
    ),
    "euler_vacuum": Problem("euler", {"pressure": 1.0, "center": 0.5, "radius": 0.05}, _euler_vacuum, False),
}


def make_initial_condition(
    name: str, params: dict[str, float] | None = None, system: ConservationLawSystem | None = None
) -> InitialCondition:
    if name not in PROBLEMS:
        raise ValueError(f"unknown initial condition '{name}' (choose from {sorted(PROBLEMS)})")

    problem = PROBLEMS[name]
    params = dict(params or {})
    unknown = set(params) - set(problem.defaults) - {"gamma"}
    if unknown:
        raise ValueError(f"unknown parameters for initial condition '{name}': {sorted(unknown)}")

    if system is not None:
        if problem.system not in ("any", system.name):
            raise ValueError(f"initial condition '{name}' is for {problem.system}, not {system.name}")
        if problem.system == "euler":
            params.setdefault("gamma", system.parameters["gamma"])

    merged = {**problem.defaults, **params}
    if name == "constant" and system is not None and len(merged["state"]) != system.nvars:
        raise ValueError(f"constant state needs {system.nvars} components: {merged['state']}")

    return InitialCondition(name=name, params=merged, system=problem.system)


def gauss_cell_averages(
    f: Callable[[Array], Array], x_left: float, dx: float, n_cells: int, order: int = 5
) -> Array:
    """Cell averages of a pointwise function by Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    centers = x_left + (np.arange(n_cells) + 0.5) * dx
    x = (centers[:, None] + 0.5 * dx * nodes[None, :]).ravel()
    values = f(x).reshape(n_cells, order, -1)
    return 0.5 * np.einsum("k,nkp->np", weights, values)
