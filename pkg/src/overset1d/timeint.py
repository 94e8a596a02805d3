"""Explicit Runge-Kutta time stepping of the coupled system.

Both grids advance together: every stage evaluates the coupled operator on
the stage states of *both* grids, so the cross-grid data seen by a stage
always belongs to that same stage. One step size is shared by both grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

Array = np.ndarray
State = tuple[Array, ...]
RHSFunction = Callable[[float, State], State]
StepCallback = Callable[[int, float, State], None]

#: a step this much shorter than the nominal one is merged into the previous
_MIN_STEP_FRACTION = 1.0e-12


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping parameters. A fixed *dt* overrides the CFL estimate."""

    method: Literal["ssprk3", "rk4"] = "ssprk3"
    cfl: float = 0.5
    dt: float | None = None
    t_final: float = 1.0
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.method not in STEPPERS:
            raise ValueError(f"unknown integrator: '{self.method}' (choose from {sorted(STEPPERS)})")
        if not self.cfl > 0:
            raise ValueError(f"cfl must be positive: {self.cfl}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive: {self.dt}")
        if not self.t_final >= 0:
            raise ValueError(f"t_final must be non-negative: {self.t_final}")

    @property
    def order(self) -> int:
        return ORDERS[self.method]


def _axpy(a: float, x: State, y: State) -> State:
    return tuple(yi + a * xi for xi, yi in zip(x, y))


def ssprk3_step(rhs: RHSFunction, t: float, q: State, dt: float) -> State:
    """Three-stage third-order strong-stability-preserving step.

    Written in increment form, which is algebraically the Shu-Osher convex
    combination but leaves ``q`` bitwise unchanged when the RHS vanishes.
    """
    k1 = rhs(t, q)
    k2 = rhs(t + dt, _axpy(dt, k1, q))
    s2 = tuple(qi + 0.25 * dt * (a + b) for qi, a, b in zip(q, k1, k2))
    k3 = rhs(t + 0.5 * dt, s2)
    return tuple(qi + dt / 6.0 * (a + b + 4.0 * c) for qi, a, b, c in zip(q, k1, k2, k3))


def rk4_step(rhs: RHSFunction, t: float, q: State, dt: float) -> State:
    """Classical fourth-order Runge-Kutta step."""
    k1 = rhs(t, q)
    k2 = rhs(t + 0.5 * dt, _axpy(0.5 * dt, k1, q))
    k3 = rhs(t + 0.5 * dt, _axpy(0.5 * dt, k2, q))
    k4 = rhs(t + dt, _axpy(dt, k3, q))
    return tuple(
        qi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for qi, a, b, c, d in zip(q, k1, k2, k3, k4)
    )


STEPPERS = {"ssprk3": ssprk3_step, "rk4": rk4_step}
ORDERS = {"ssprk3": 3, "rk4": 4}


def stable_dt(max_speed: float, dx: float | Sequence[float], cfl: float) -> float:
    """``cfl * min(dx) / max_speed``."""
    dx_min = float(np.min(dx))
    if not (np.isfinite(max_speed) and max_speed > 0):
        raise ValueError(
            f"cannot derive a time step from maximum wave speed {max_speed}; "
            "set a fixed dt instead"
        )
    return cfl * dx_min / max_speed


def grid_stable_dt(system, grids: Sequence, cfl: float) -> float:
    """:func:`stable_dt` from the fastest wave on any of *grids*."""
    speed = max(float(np.max(system.max_wave_speed(g.values))) for g in grids)
    return stable_dt(speed, [g.dx for g in grids], cfl)


@dataclass
class AdvanceResult:
    state: State
    t: float
    n_steps: int


def advance(
    rhs: RHSFunction,
    q0: State,
    config: IntegratorConfig,
    dt_estimate: Callable[[State], float] | None = None,
    t0: float = 0.0,
    on_step: StepCallback | None = None,
) -> AdvanceResult:
    """Integrate from *t0* to ``config.t_final``.

    Without a fixed ``config.dt``, *dt_estimate* is called with the current
    state before every step. The last step is shortened to land on
    ``t_final`` exactly. *on_step* sees ``(step, t, state)`` after each step.
    """
    if config.dt is None and dt_estimate is None:
        raise ValueError("need either a fixed dt or a dt estimate")

    step_fn = STEPPERS[config.method]
    q = tuple(np.array(qi, dtype=np.float64) for qi in q0)
    t = t0
    t_end = config.t_final
    n = 0

    while t < t_end:
        if n >= config.max_steps:
            raise RuntimeError(f"exceeded {config.max_steps} steps before t_final = {t_end}")

        dt = config.dt if config.dt is not None else dt_estimate(q)
        if t + dt * (1.0 + _MIN_STEP_FRACTION) >= t_end:
            dt = t_end - t

        q = step_fn(rhs, t, q, dt)
        n += 1
        t = t_end if t + dt >= t_end else t + dt

        if on_step is not None:
            on_step(n, t, q)

    return AdvanceResult(state=q, t=t, n_steps=n)
