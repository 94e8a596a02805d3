import numpy as np
import pytest

from overset1d.geometry import GridField
from overset1d.systems import Burgers, ShallowWater
from overset1d.timeint import IntegratorConfig, advance, grid_stable_dt, rk4_step, ssprk3_step, stable_dt


def decay(t, state):
    return tuple(-q for q in state)


@pytest.mark.parametrize("method,order", [("ssprk3", 3), ("rk4", 4)])
def test_scalar_ode_order(method, order):
    errors = []
    dts = [0.1, 0.05, 0.025, 0.0125]
    for dt in dts:
        cfg = IntegratorConfig(method=method, dt=dt, t_final=1.0)
        res = advance(decay, (np.array([1.0]),), cfg)
        errors.append(abs(res.state[0][0] - np.exp(-1.0)))
    slope = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    assert abs(slope - order) < 0.1


def test_single_steps_match_hand_values():
    # y' = -y, dt = 0.5: both are truncated Taylor series of exp(-dt)
    q = (np.array([1.0]),)
    assert ssprk3_step(decay, 0.0, q, 0.5)[0][0] == pytest.approx(1 - 0.5 + 0.125 - 0.125 / 6 * 1.0, rel=1e-15)
    assert rk4_step(decay, 0.0, q, 0.5)[0][0] == pytest.approx(
        1 - 0.5 + 0.125 - 0.5**3 / 6 + 0.5**4 / 24, rel=1e-15
    )


def test_stage_times():
    seen = []

    def rhs(t, state):
        seen.append(t)
        return tuple(np.zeros_like(q) for q in state)

    ssprk3_step(rhs, 1.0, (np.zeros(1),), 0.2)
    assert seen == [1.0, 1.2, 1.1]
    seen.clear()
    rk4_step(rhs, 1.0, (np.zeros(1),), 0.2)
    assert seen == [1.0, 1.1, 1.1, 1.2]


def test_zero_rhs_is_bitwise_identity():
    q0 = (np.random.default_rng(3).normal(size=(7, 2)), np.arange(5.0)[:, None])
    zero = lambda t, s: tuple(np.zeros_like(q) for q in s)  # noqa: E731
    for method in ("ssprk3", "rk4"):
        res = advance(zero, q0, IntegratorConfig(method=method, dt=0.013, t_final=0.1))
        assert all(np.array_equal(a, b) for a, b in zip(res.state, q0))


def test_last_step_clipped_and_callback():
    calls = []
    res = advance(
        decay,
        (np.array([1.0]),),
        IntegratorConfig(dt=0.3, t_final=1.0),
        on_step=lambda n, t, s: calls.append((n, t)),
    )
    assert res.t == 1.0
    assert res.n_steps == 4
    assert [c[0] for c in calls] == [1, 2, 3, 4]
    assert calls[-1][1] == 1.0
    assert calls[2][1] == pytest.approx(0.9)


def test_stable_dt():
    assert stable_dt(2.0, 0.01, 0.5) == pytest.approx(0.0025)
    assert stable_dt(2.0, [0.02, 0.01], 0.5) == pytest.approx(0.0025)
    # still water: sqrt(g h) > 0
    assert stable_dt(np.sqrt(9.81), 0.01, 0.5) > 0
    with pytest.raises(ValueError, match="fixed dt"):
        stable_dt(0.0, 0.01, 0.5)


def test_grid_stable_dt():
    u = np.zeros((100, 1))
    u[17] = -2.0
    g1 = GridField("U", 0.0, 1.0, u)
    g2 = GridField("V", 0.0, 2.0, np.full((100, 1), 0.5))
    assert grid_stable_dt(Burgers(), [g1, g2], 0.5) == pytest.approx(0.0025)

    still = GridField("single", 0.0, 1.0, np.tile([2.0, 0.0], (10, 1)))
    assert grid_stable_dt(ShallowWater(), [still], 1.0) == pytest.approx(0.1 / np.sqrt(9.81 * 2.0))

    with pytest.raises(ValueError, match="fixed dt"):
        grid_stable_dt(Burgers(), [GridField("U", 0.0, 1.0, np.zeros((10, 1)))], 0.5)


def test_config_validation():
    with pytest.raises(ValueError, match="unknown integrator"):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(cfl=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt=-1.0)
    with pytest.raises(ValueError, match="dt"):
        advance(decay, (np.ones(1),), IntegratorConfig(t_final=1.0))
    assert IntegratorConfig(method="rk4").order == 4


def test_max_steps_guard():
    with pytest.raises(RuntimeError, match="exceeded"):
        advance(decay, (np.ones(1),), IntegratorConfig(dt=1e-3, t_final=1.0, max_steps=10))
