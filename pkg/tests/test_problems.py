import numpy as np
import pytest

from overset1d.problems import bump, gauss_cell_averages, make_initial_condition
from overset1d.systems import Burgers, Euler, ShallowWater


def test_bump():
    assert bump(np.array([0.3]), 0.3, 0.25)[0] == 1.0
    assert bump(np.array([0.05, 0.55, 0.9]), 0.3, 0.25).tolist() == [0.0, 0.0, 0.0]


def test_burgers_characteristics_solve_the_implicit_relation():
    ic = make_initial_condition("burgers_bump")
    x = np.linspace(0.0, 1.0, 101)
    t = 0.5
    u = ic.exact(x, t)[:, 0]
    # u(x, t) = u0(x - u t)
    u0 = ic(x - u * t)[:, 0]
    np.testing.assert_allclose(u, u0, atol=1e-13)
    np.testing.assert_array_equal(ic.exact(x, 0.0), ic(x))


def test_sine_exact():
    ic = make_initial_condition("burgers_sine", {"base": 0.5})
    x = np.linspace(0.0, 1.0, 33)
    u = ic.exact(x, 0.3)[:, 0]
    np.testing.assert_allclose(u, 0.5 + 0.2 * np.sin(2 * np.pi * (x - u * 0.3)), atol=1e-13)


def test_euler_pulse_advects():
    ic = make_initial_condition("euler_density_pulse", system=Euler())
    x = np.linspace(0, 1, 50)
    np.testing.assert_allclose(ic.exact(x + 0.25, 0.5), ic(x), atol=1e-15)
    assert np.allclose(Euler().pressure(ic(x)), 1.0)


def test_gauss_averages_exact_for_polynomials():
    avg = gauss_cell_averages(lambda x: (x**3)[:, None], 0.0, 0.5, 2)
    np.testing.assert_allclose(avg[:, 0], [0.5**3 / 4, (1 - 0.5**4) / 4 / 0.5], rtol=1e-14)


def test_validation():
    with pytest.raises(ValueError, match="unknown initial condition"):
        make_initial_condition("blast")
    with pytest.raises(ValueError, match="unknown parameters"):
        make_initial_condition("burgers_bump", {"width": 1.0})
    with pytest.raises(ValueError, match="not shallow_water"):
        make_initial_condition("burgers_bump", system=ShallowWater())
    with pytest.raises(ValueError, match="components"):
        make_initial_condition("constant", {"state": [1.0]}, system=ShallowWater())
    assert make_initial_condition("constant", {"state": [0.3]}, Burgers())(np.zeros(3)).shape == (3, 1)
    with pytest.raises(ValueError, match="no exact"):
        make_initial_condition("sw_pulse").exact(np.zeros(2), 1.0)
