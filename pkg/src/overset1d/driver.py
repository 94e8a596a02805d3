"""Simulation driver: builds a problem from a :class:`RunConfig` and runs the
overset solver, the overset/single-domain equivalence study and the
grid-convergence study."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from overset1d.config import ConfigError, RunConfig
from overset1d.coupling import PenaltyConfig
from overset1d.diagnostics import BudgetLedger, cell_weights, emit_ledger, emit_state
from overset1d.geometry import (
    GridField,
    InterpolationOperator,
    OversetGeometry1D,
    build_grids,
    is_aligned,
)
from overset1d.problems import InitialCondition, gauss_cell_averages, make_initial_condition
from overset1d.spatial import BoundaryCondition, OversetRHS, StateError, single_domain_rhs
from overset1d.systems import AdmissibilityError, ConservationLawSystem, make_system
from overset1d.timeint import IntegratorConfig, advance, stable_dt

logger = logging.getLogger(__name__)

Array = np.ndarray


@dataclass
class Simulation:
    """A configured overset problem, ready to integrate."""

    config: RunConfig
    system: ConservationLawSystem
    geom: OversetGeometry1D
    rhs: OversetRHS
    initial: InitialCondition
    q_u0: Array
    q_v0: Array
    integrator: IntegratorConfig

    @property
    def grid_u(self) -> GridField:
        return self.rhs.grid_u

    @property
    def grid_v(self) -> GridField:
        return self.rhs.grid_v

    def rhs_fn(self, t, state):
        return self.rhs(state[0], state[1], t)

    def dt_estimate(self, state) -> float:
        speed = max(float(np.max(self.system.max_wave_speed(q))) for q in state)
        return stable_dt(speed, (self.grid_u.dx, self.grid_v.dx), self.integrator.cfl)


def _initial_values(ic: InitialCondition, grid: GridField) -> Array:
    return gauss_cell_averages(ic, grid.x_left, grid.dx, grid.n_cells)


def _union_grid(geom: OversetGeometry1D, grid_u: GridField, nvars: int) -> tuple[GridField, int]:
    """Single grid over ``[a, d]`` containing the cells of aligned grids, and
    the index of V's first cell in it."""
    dx = grid_u.dx
    n = int(round((geom.d - geom.a) / dx))
    offset = int(round((geom.b - geom.a) / dx))
    return GridField("single", geom.a, geom.d, np.zeros((n, nvars))), offset


def build_simulation(cfg: RunConfig) -> Simulation:
    """Turn a configuration into a :class:`Simulation`.

    Invalid combinations (unknown system or initial condition, misaligned
    grids in ``exact_node`` mode, ...) raise :class:`ConfigError`.
    """
    try:
        system = make_system(cfg.system.name, cfg.system.params)
        g = cfg.geometry
        geom = OversetGeometry1D(g.a, g.b, g.c, g.d, g.eta)
        ic = make_initial_condition(cfg.initial_condition.name, cfg.initial_condition.params, system)

        grid_u, grid_v = build_grids(geom, cfg.grid.n_u, cfg.grid.n_v, nvars=system.nvars)
        pen = cfg.penalties
        penalties = PenaltyConfig.scalar(geom.eta, geom.b, geom.c, pen.M, pen.sigma, system.nvars, kappa=pen.kappa)

        if cfg.bc.kind == "dirichlet_exact":
            reference = ic.exact if ic.has_exact else (lambda x, t: ic(x))
            bc = BoundaryCondition("dirichlet_exact", reference)
        else:
            bc = BoundaryCondition(cfg.bc.kind)

        interp = InterpolationOperator(order=cfg.interpolation.order, mode=cfg.interpolation.mode)
        rhs = OversetRHS(system, geom, grid_u, grid_v, penalties, interp, bc)

        it = cfg.integrator
        integrator = IntegratorConfig(method=it.method, cfl=it.cfl, dt=it.dt, t_final=it.t_final)
    except ConfigError:
        raise
    except AdmissibilityError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    if is_aligned(geom, grid_u.n_cells, grid_v.n_cells):
        # sample once on the union grid so shared cells agree bitwise
        single, offset = _union_grid(geom, grid_u, system.nvars)
        q = _initial_values(ic, single)
        q_u0 = q[: grid_u.n_cells].copy()
        q_v0 = q[offset:].copy()
    else:
        q_u0 = _initial_values(ic, grid_u)
        q_v0 = _initial_values(ic, grid_v)

    return Simulation(cfg, system, geom, rhs, ic, q_u0, q_v0, integrator)


# {{{ run


@dataclass
class RunResult:
    ledger: list[BudgetLedger]
    q_u: Array
    q_v: Array
    t: float
    n_steps: int
    files: list[Path] = field(default_factory=list)


def run(cfg: RunConfig, out_dir: str | Path | None = None, figures: bool | None = None) -> RunResult:
    """Run the overset simulation and, if *out_dir* is given, write
    ``ledger.csv``, ``final_u.csv``, ``final_v.csv`` and the figures.

    On an admissibility failure the partial ledger is still written before
    the error propagates.
    """
    sim = build_simulation(cfg)
    for q, name in ((sim.q_u0, "U"), (sim.q_v0, "V")):
        try:
            sim.system.check_admissible(q)
        except AdmissibilityError as exc:
            raise StateError(name, exc, 0.0) from exc

    cadence = cfg.output.cadence
    t_final = sim.integrator.t_final
    ledger: list[BudgetLedger] = []

    def on_step(step, t, state):
        if step % cadence == 0 or t == t_final:
            ledger.append(BudgetLedger.record(sim.rhs, state[0], state[1], t))

    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    try:
        result = advance(sim.rhs_fn, (sim.q_u0, sim.q_v0), sim.integrator, sim.dt_estimate, on_step=on_step)
    except AdmissibilityError:
        if out is not None:
            emit_ledger(ledger, out / "ledger.csv", sim.system.nvars)
        raise

    q_u, q_v = result.state
    run_result = RunResult(ledger, q_u, q_v, result.t, result.n_steps)
    logger.info("reached t = %.6g after %d steps", result.t, result.n_steps)

    if out is not None:
        gu = sim.grid_u.with_values(q_u)
        gv = sim.grid_v.with_values(q_v)
        run_result.files += [
            emit_ledger(ledger, out / "ledger.csv", sim.system.nvars),
            emit_state(gu, out / "final_u.csv"),
            emit_state(gv, out / "final_v.csv"),
        ]
        if cfg.output.figures if figures is None else figures:
            from overset1d import plotting

            exact = sim.initial.exact if sim.initial.has_exact else None
            run_result.files += [
                plotting.plot_solution(sim.system, sim.geom, gu, gv, out / "solution.png", t=result.t, exact=exact),
                plotting.plot_ledger(ledger, out / "budgets.png"),
            ]

    return run_result


# }}}


# {{{ equivalence


@dataclass
class EquivalenceReport:
    max_difference: float
    n_steps: int
    t_final: float
    n_single: int

    def summary(self) -> str:
        return (
            f"overset vs single domain: max |difference| = {self.max_difference:.3e} "
            f"over {self.n_steps} steps to t = {self.t_final:.6g} ({self.n_single} single-domain cells)"
        )


def run_equivalence(cfg: RunConfig) -> EquivalenceReport:
    """Advance the overset and the single-domain solver side by side from
    identical data and report the largest pointwise difference seen."""
    sim = build_simulation(cfg)
    geom = sim.geom
    if cfg.interpolation.mode != "exact_node" or not is_aligned(geom, cfg.grid.n_u, cfg.grid.n_v):
        raise ConfigError(
            "equivalence needs exact_node interpolation on aligned grids: equal spacing and "
            "b, c on faces of both grids, so that every overlap cell is shared"
        )

    single, offset = _union_grid(geom, sim.grid_u, sim.system.nvars)
    n_single = single.n_cells
    n_u = cfg.grid.n_u
    q0 = _initial_values(sim.initial, single)
    bc = sim.rhs.bc

    def rhs_fn(t, state):
        du, dv = sim.rhs(state[0], state[1], t)
        ds = single_domain_rhs(sim.system, single, bc, t, state[2])
        return du, dv, ds

    def dt_estimate(state):
        speed = float(np.max(sim.system.max_wave_speed(state[2])))
        return stable_dt(speed, single.dx, sim.integrator.cfl)

    max_diff = 0.0

    def difference(state) -> float:
        qu, qv, qs = state
        return max(float(np.max(np.abs(qu - qs[:n_u]))), float(np.max(np.abs(qv - qs[offset:]))))

    def on_step(step, t, state):
        nonlocal max_diff
        max_diff = max(max_diff, difference(state))

    state0 = (q0[:n_u].copy(), q0[offset:].copy(), q0)
    max_diff = difference(state0)
    result = advance(rhs_fn, state0, sim.integrator, dt_estimate, on_step=on_step)

    return EquivalenceReport(max_diff, result.n_steps, result.t, n_single)


# }}}


# {{{ convergence


@dataclass
class ConvergenceTable:
    n_u: list[int]
    n_v: list[int]
    dx: list[float]
    errors: list[float]
    reference: str

    @property
    def orders(self) -> list[float]:
        return [
            float(np.log(self.errors[i] / self.errors[i + 1]) / np.log(self.dx[i] / self.dx[i + 1]))
            for i in range(len(self.errors) - 1)
        ]

    def format(self) -> str:
        lines = [f"reference: {self.reference}", f"{'n_u':>6} {'n_v':>6} {'dx':>12} {'L2 error':>12} {'order':>6}"]
        orders = [None] + self.orders
        for nu, nv, dx, err, p in zip(self.n_u, self.n_v, self.dx, self.errors, orders):
            ptxt = "" if p is None else f"{p:6.2f}"
            lines.append(f"{nu:6d} {nv:6d} {dx:12.4e} {err:12.4e} {ptxt:>6}")
        return "\n".join(lines)

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        orders = [float("nan")] + self.orders
        with open(path, "w", newline="") as f:
            f.write("n_u,n_v,dx,l2_error,observed_order\n")
            for row in zip(self.n_u, self.n_v, self.dx, self.errors, orders):
                f.write("%d,%d,%.17g,%.17g,%.17g\n" % row)
        return path


def weighted_l2(geom: OversetGeometry1D, gu: GridField, eu: Array, gv: GridField, ev: Array) -> float:
    total = 0.0
    for g, e in ((gu, eu), (gv, ev)):
        total += float(np.sum(cell_weights(geom, g)[:, None] * e * e) * g.dx)
    return float(np.sqrt(total))


def _restrict(q: Array, factor: int) -> Array:
    return q.reshape(-1, factor, q.shape[-1]).mean(axis=1)


def run_convergence(cfg: RunConfig, levels: int = 4) -> ConvergenceTable:
    """L2 errors on *levels* grids, each twice as fine as the previous.

    The error is taken against exact cell averages when the initial condition
    has an exact solution, and otherwise against one extra, finer level
    restricted onto each grid.
    """
    if levels < 1:
        raise ConfigError(f"need at least one level: {levels}")

    base = build_simulation(cfg)
    exact = base.initial.has_exact
    n_runs = levels if exact else levels + 1

    finals = []
    for k in range(n_runs):
        level_cfg = cfg.replace(grid={"n_u": cfg.grid.n_u * 2**k, "n_v": cfg.grid.n_v * 2**k})
        sim = build_simulation(level_cfg)
        result = advance(sim.rhs_fn, (sim.q_u0, sim.q_v0), sim.integrator, sim.dt_estimate)
        finals.append((sim, result))
        logger.info("level %d: %d + %d cells, %d steps", k, sim.grid_u.n_cells, sim.grid_v.n_cells, result.n_steps)

    table = ConvergenceTable([], [], [], [], "exact solution" if exact else "finest-level solution")
    _, ref_result = finals[-1]
    for k in range(levels):
        sim, result = finals[k]
        gu, gv = sim.grid_u, sim.grid_v
        if exact:
            t = result.t
            ref_u = gauss_cell_averages(lambda x: sim.initial.exact(x, t), gu.x_left, gu.dx, gu.n_cells)
            ref_v = gauss_cell_averages(lambda x: sim.initial.exact(x, t), gv.x_left, gv.dx, gv.n_cells)
        else:
            factor = 2 ** (levels - k)
            ref_u = _restrict(ref_result.state[0], factor)
            ref_v = _restrict(ref_result.state[1], factor)

        q_u, q_v = result.state
        table.n_u.append(gu.n_cells)
        table.n_v.append(gv.n_cells)
        table.dx.append(max(gu.dx, gv.dx))
        table.errors.append(weighted_l2(sim.geom, gu, q_u - ref_u, gv, q_v - ref_v))

    return table


# }}}
