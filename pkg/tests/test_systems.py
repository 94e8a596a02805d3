import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overset1d.systems import (
    AdmissibilityError,
    Burgers,
    Euler,
    ShallowWater,
    ec_flux,
    entropy,
    entropy_flux,
    entropy_potential,
    entropy_variables,
    jump_condition_residual,
    log_mean,
    make_system,
    numerical_entropy_flux,
    physical_flux,
)


# {{{ hand-computed values


def test_burgers_values():
    b = Burgers()
    assert physical_flux(b, np.array([2.0]))[0] == 2.0
    assert entropy(b, np.array([2.0])) == 2.0
    assert entropy_flux(b, np.array([2.0])) == pytest.approx(8.0 / 3.0, rel=1e-15)
    assert entropy_variables(b, np.array([-1.5]))[0] == -1.5
    assert ec_flux(b, np.array([2.0]), np.array([0.0]))[0] == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert ec_flux(b, np.array([1.0]), np.array([1.0]))[0] == 0.5
    # (2, 0): {{w}} f^ec - {{psi}} = 1 * 2/3 - 2/3
    assert numerical_entropy_flux(b, np.array([2.0]), np.array([0.0])) == pytest.approx(0.0, abs=1e-15)


def test_shallow_water_values():
    sw = ShallowWater(g=9.81)
    f = physical_flux(sw, np.array([1.0, 0.5]))
    np.testing.assert_allclose(f, [0.5, 0.25 + 0.5 * 9.81], rtol=1e-15)
    assert entropy(sw, np.array([2.0, 0.0])) == pytest.approx(0.5 * 9.81 * 4.0)
    np.testing.assert_allclose(entropy_variables(sw, np.array([1.0, 1.0])), [9.81 - 0.5, 1.0])


def test_euler_values():
    e = Euler(gamma=1.4)
    # rho = 1, u = 0, p = 1
    q = np.array([1.0, 0.0, 2.5])
    np.testing.assert_allclose(physical_flux(e, q), [0.0, 1.0, 0.0], atol=1e-15)
    assert entropy(e, q) == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(entropy_variables(e, q), [1.4 / 0.4, 0.0, -1.0], rtol=1e-15)
    assert e.max_wave_speed(q) == pytest.approx(np.sqrt(1.4))


def test_potential_closed_forms_match_definition(system, rng):
    q = system.random_states(rng, 500)
    np.testing.assert_allclose(system.potential(q), entropy_potential(system, q), rtol=1e-12, atol=1e-12)


def test_log_mean():
    a = np.array([1.0, 2.0, 1.0 + 1e-6, 3.0])
    b = np.array([1.0, 1.0, 1.0, 3.0 + 1e-9])
    exact = np.empty(4)
    exact[0] = 1.0
    exact[1] = 1.0 / np.log(2.0)
    exact[2] = 1e-6 / np.log1p(1e-6)
    exact[3] = 3.0 + 0.5e-9
    np.testing.assert_allclose(log_mean(a, b), exact, rtol=1e-14)
    assert np.array_equal(log_mean(a, b), log_mean(b, a))


# }}}


# {{{ properties


def test_jump_condition_random_pairs(system, rng):
    ql = system.random_states(rng, 10_000)
    qr = system.random_states(rng, 10_000)
    rep = jump_condition_residual(system, ql, qr)
    assert np.max(rep.relative_residual) < 1e-12


def test_ec_flux_symmetric_and_consistent(system, rng):
    ql = system.random_states(rng, 1000)
    qr = system.random_states(rng, 1000)
    assert np.array_equal(system.ec_flux(ql, qr), system.ec_flux(qr, ql))
    assert np.array_equal(system.ec_flux(ql, ql), system.flux(ql))


def test_numerical_entropy_flux_consistent(system, rng):
    q = system.random_states(rng, 200)
    np.testing.assert_allclose(numerical_entropy_flux(system, q, q), system.entropy_flux(q), rtol=1e-12, atol=1e-13)


def test_entropy_variables_are_gradient(system, rng):
    q = system.random_states(rng, 50)
    w = system.entropy_variables(q)
    h = 1e-6
    for k in range(system.nvars):
        dq = np.zeros(system.nvars)
        dq[k] = h
        fd = (system.entropy(q + dq) - system.entropy(q - dq)) / (2 * h)
        np.testing.assert_allclose(w[:, k], fd, rtol=1e-6, atol=1e-7)


def test_entropy_flux_compatibility(system, rng):
    # w^T df/dq = d f^eps/dq
    q = system.random_states(rng, 50)
    w = system.entropy_variables(q)
    h = 1e-6
    for k in range(system.nvars):
        dq = np.zeros(system.nvars)
        dq[k] = h
        df = (system.flux(q + dq) - system.flux(q - dq)) / (2 * h)
        dfe = (system.entropy_flux(q + dq) - system.entropy_flux(q - dq)) / (2 * h)
        np.testing.assert_allclose(np.sum(w * df, axis=-1), dfe, rtol=1e-6, atol=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_burgers_jump_hypothesis(u, v):
    b = Burgers()
    rep = jump_condition_residual(b, np.array([u]), np.array([v]))
    assert rep.relative_residual < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 5), st.floats(-3, 3), st.floats(0.05, 5), st.floats(-3, 3))
def test_shallow_water_jump_hypothesis(hl, ul, hr, ur):
    sw = ShallowWater()
    rep = jump_condition_residual(sw, np.array([hl, hl * ul]), np.array([hr, hr * ur]))
    assert rep.relative_residual < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.05, 5), st.floats(-2, 2), st.floats(0.05, 5),
    st.floats(0.05, 5), st.floats(-2, 2), st.floats(0.05, 5),
)
def test_euler_jump_hypothesis(rl, ul, pl, rr, ur, pr):
    e = Euler()
    ql = np.array([rl, rl * ul, pl / 0.4 + 0.5 * rl * ul * ul])
    qr = np.array([rr, rr * ur, pr / 0.4 + 0.5 * rr * ur * ur])
    rep = jump_condition_residual(e, ql, qr)
    assert rep.relative_residual < 1e-11


# }}}


# {{{ errors


def test_inadmissible_states_are_flagged():
    with pytest.raises(AdmissibilityError, match="h > 0") as exc:
        physical_flux(ShallowWater(), np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert exc.value.index == 1

    with pytest.raises(AdmissibilityError, match="rho > 0"):
        ec_flux(Euler(), np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 1.0]))
    with pytest.raises(AdmissibilityError, match="p > 0"):
        entropy(Euler(), np.array([1.0, 2.0, 1.0]))
    with pytest.raises(AdmissibilityError, match="finite"):
        entropy(Burgers(), np.array([np.nan]))


def test_make_system():
    assert make_system("euler", {"gamma": 5 / 3}).gamma == 5 / 3
    with pytest.raises(ValueError, match="unknown system"):
        make_system("mhd")
    with pytest.raises(ValueError, match="gamma"):
        make_system("euler", {"gamma": 1.0})
    with pytest.raises(ValueError, match="components"):
        Burgers().check_admissible(np.zeros((3, 2)))


# }}}
