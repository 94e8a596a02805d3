import numpy as np
import pytest

from overset1d.geometry import (
    GridField,
    InterpolationError,
    InterpolationOperator,
    OversetGeometry1D,
    aligned_sizes,
    build_grids,
    evaluate_at,
    find_aligned_sizes,
    is_aligned,
    lagrange_weights,
)

GEOM = OversetGeometry1D(0.0, 0.4, 0.6, 1.0, 0.5)


def test_geometry_validation():
    with pytest.raises(ValueError, match="a < b < c < d"):
        OversetGeometry1D(0.0, 0.6, 0.4, 1.0)
    with pytest.raises(ValueError, match="a < b < c < d"):
        OversetGeometry1D(0.0, 0.5, 0.5, 1.0)
    for eta in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError, match=r"eta must lie in \(0,1\)"):
            OversetGeometry1D(0.0, 0.4, 0.6, 1.0, eta)


def test_spans_and_overlap():
    assert GEOM.span_u == (0.0, 0.6)
    assert GEOM.span_v == (0.4, 1.0)
    assert list(GEOM.in_overlap([0.39, 0.4, 0.5, 0.6, 0.61])) == [False, True, True, True, False]


def test_grid_field():
    g = GridField("U", 0.0, 1.0, np.zeros((10, 1)))
    assert g.dx == 0.1
    np.testing.assert_allclose(g.centers, np.arange(10) * 0.1 + 0.05)
    assert g.faces.size == 11
    assert g.cell_index(0.0) == 0
    assert g.cell_index(0.1) == 1  # faces go right
    assert g.cell_index(1.0) == 9
    with pytest.raises(InterpolationError):
        g.cell_index(1.5)
    with pytest.raises(ValueError, match="shape"):
        GridField("U", 0.0, 1.0, np.zeros(10))


def test_exact_node_returns_node_value_unmodified():
    values = np.random.default_rng(1).normal(size=(30, 2))
    g = GridField("V", 0.4, 1.0, values)
    for j in (0, 7, 29):
        out = evaluate_at(g, float(g.centers[j]), InterpolationOperator())
        assert out is values[j] or np.array_equal(out, values[j])
    with pytest.raises(InterpolationError, match="not a cell center"):
        evaluate_at(g, 0.4, InterpolationOperator())
    with pytest.raises(InterpolationError, match="outside"):
        evaluate_at(g, 0.3, InterpolationOperator())


@pytest.mark.parametrize("order", [1, 2, 3])
def test_lagrange_reproduces_polynomials(order):
    g = GridField("U", 0.0, 1.0, np.zeros((20, 1)))
    coeffs = np.arange(1, order + 2, dtype=float)
    g = g.with_values(np.polyval(coeffs, g.centers)[:, None])
    interp = InterpolationOperator(order=order, mode="lagrange")
    for x in (0.0, 0.013, 0.5, 0.777, 1.0):
        assert evaluate_at(g, x, interp)[0] == pytest.approx(np.polyval(coeffs, x), abs=1e-12)


def test_lagrange_weights_partition_of_unity():
    w = lagrange_weights(np.array([0.0, 1.0, 3.0]), 0.4)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


def test_interpolation_operator_validation():
    with pytest.raises(ValueError):
        InterpolationOperator(order=0)
    with pytest.raises(ValueError):
        InterpolationOperator(mode="spline")


def test_alignment():
    assert aligned_sizes(GEOM, 2) == (6, 6)
    assert aligned_sizes(GEOM, 67) == (201, 201)
    assert is_aligned(GEOM, 201, 201)
    assert not is_aligned(GEOM, 200, 200)
    assert not is_aligned(GEOM, 30, 60)
    assert find_aligned_sizes(GEOM, 100) == (99, 99)
    with pytest.raises(ValueError):
        aligned_sizes(OversetGeometry1D(0.0, 0.4, 0.6, 1.0 + np.pi / 100), 2)


def test_build_grids():
    u, v = build_grids(GEOM, 30, 30, nvars=2)
    assert (u.x_left, u.x_right, v.x_left, v.x_right) == (0.0, 0.6, 0.4, 1.0)
    assert u.values.shape == (30, 2)
    # overlap cells coincide
    np.testing.assert_allclose(u.centers[20:], v.centers[:10], rtol=0, atol=1e-15)
    with pytest.raises(ValueError, match="at least 4"):
        build_grids(GEOM, 3, 30)
