"""Tests for the strip grid, quadrature, and difference operators."""

import numpy as np
import pytest

from bsch.errors import ShapeError
from bsch.grid import (
    CoupledField,
    StripGrid,
    boundary_flux,
    dirichlet_form_bulk,
    dirichlet_form_surface,
    fourier_symbol,
    inner_L2,
    laplacian_bulk,
    laplacian_surface,
    means,
    normal_derivative,
    trace,
)


@pytest.fixture
def g():
    return StripGrid(nx=16, ny=9, lx=2.0)


def bulk_xy(g, fn):
    return fn(g.x[:, None], g.y[None, :]) * np.ones((g.nx, g.ny))


def random_bulk(g, seed=0):
    return np.random.default_rng(seed).standard_normal((g.nx, g.ny))


def test_grid_validation():
    with pytest.raises(ValueError):
        StripGrid(nx=3, ny=9)
    with pytest.raises(ValueError):
        StripGrid(nx=8, ny=3)
    with pytest.raises(ValueError):
        StripGrid(nx=8, ny=9, lx=0.0)


def test_grid_measures(g):
    assert g.area == 2.0
    assert g.perimeter == 4.0
    assert g.hx == pytest.approx(0.125)
    assert g.hy == pytest.approx(0.125)
    assert np.sum(g.wy) == pytest.approx(1.0, rel=1e-15)
    assert np.sum(g.bulk_weights) == pytest.approx(g.area, rel=1e-14)


def test_shape_checks(g):
    with pytest.raises(ShapeError):
        laplacian_bulk(g, np.zeros((3, 3)))
    with pytest.raises(ShapeError):
        laplacian_surface(g, np.zeros((3, g.nx)))


def test_laplacian_bulk_constant(g):
    out = laplacian_bulk(g, np.ones((g.nx, g.ny)))
    assert np.max(np.abs(out)) == 0.0


def test_laplacian_bulk_cosine_symbol(g):
    u = bulk_xy(g, lambda x, y: np.cos(2.0 * np.pi * x / g.lx))
    out = laplacian_bulk(g, u)
    np.testing.assert_allclose(out, -fourier_symbol(g, 1) * u, rtol=1e-12, atol=1e-12)
    # Discrete symbol approximates the continuous one at second order.
    assert fourier_symbol(g, 1) == pytest.approx((2 * np.pi / g.lx) ** 2, rel=0.02)


def test_laplacian_bulk_quadratic_interior(g):
    u = bulk_xy(g, lambda x, y: y**2)
    out = laplacian_bulk(g, u)
    np.testing.assert_allclose(out[:, 1:-1], 2.0, rtol=1e-12)


def test_laplacian_surface_examples(g):
    v = np.ones((2, g.nx))
    assert np.max(np.abs(laplacian_surface(g, v))) == 0.0
    v = np.vstack([np.cos(2 * np.pi * g.x / g.lx)] * 2)
    out = laplacian_surface(g, v)
    np.testing.assert_allclose(out, -fourier_symbol(g, 1) * v, atol=1e-11)
    rnd = np.random.default_rng(1).standard_normal((2, g.nx))
    assert abs(np.sum(laplacian_surface(g, rnd))) < 1e-12 * g.nx


def test_laplacian_surface_self_adjoint_nsd(g):
    rng = np.random.default_rng(2)
    v = rng.standard_normal((2, g.nx))
    w = rng.standard_normal((2, g.nx))
    lv, lw = laplacian_surface(g, v), laplacian_surface(g, w)
    assert np.sum(lv * w) == pytest.approx(np.sum(v * lw), abs=1e-12 * g.nx)
    assert np.sum(lv * v) <= 1e-12


def test_normal_derivative_examples(g):
    assert np.max(np.abs(normal_derivative(g, np.ones((g.nx, g.ny))))) == 0.0
    u = bulk_xy(g, lambda x, y: y)
    nd = normal_derivative(g, u)
    np.testing.assert_allclose(nd[0], -1.0, rtol=1e-12)
    np.testing.assert_allclose(nd[1], 1.0, rtol=1e-12)
    u = bulk_xy(g, lambda x, y: y**2)
    nd = normal_derivative(g, u)
    np.testing.assert_allclose(nd[0], 0.0, atol=1e-12)
    np.testing.assert_allclose(nd[1], 2.0, rtol=1e-12)


def test_boundary_flux_linear_exact(g):
    u = bulk_xy(g, lambda x, y: 3.0 * y + 1.0)
    bf = boundary_flux(g, u)
    np.testing.assert_allclose(bf[0], -3.0, rtol=1e-12)
    np.testing.assert_allclose(bf[1], 3.0, rtol=1e-12)
    # Second-order trace derivative agrees with the flux to O(hy) on smooth data.
    smooth = bulk_xy(g, lambda x, y: np.sin(np.pi * y) + y**3)
    gap = np.max(np.abs(normal_derivative(g, smooth) - boundary_flux(g, smooth)))
    assert gap < 4.0 * g.hy


def test_green_identity_exact(g):
    # (laplacian u, w)_Omega = -Dirichlet(u, w) + <flux(u), w|_Gamma>_Gamma,
    # exactly, on random (non-smooth) fields: the identity that underpins the
    # weak-form assembly.  The boundary rows of laplacian_bulk carry only the
    # tangential part; the first-order flux supplies their normal closure.
    for seed in range(3):
        u, w = random_bulk(g, seed), random_bulk(g, seed + 10)
        lhs = np.sum(laplacian_bulk(g, u) * w * g.bulk_weights)
        rhs = -dirichlet_form_bulk(g, u, w)
        rhs += np.sum(boundary_flux(g, u) * trace(w)) * g.hx
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_dirichlet_form_surface_matches_laplacian(g):
    rng = np.random.default_rng(5)
    v = rng.standard_normal((2, g.nx))
    w = rng.standard_normal((2, g.nx))
    lhs = -np.sum(laplacian_surface(g, v) * w) * g.hx
    assert lhs == pytest.approx(dirichlet_form_surface(g, v, w), rel=1e-12)


def test_means_examples(g):
    c = CoupledField.constant(g, 3.25)
    assert means(g, c) == (pytest.approx(3.25), pytest.approx(3.25))
    f = CoupledField.from_bulk(bulk_xy(g, lambda x, y: np.cos(2 * np.pi * x / g.lx)))
    mb, ms = means(g, f)
    assert abs(mb) < 1e-14 and abs(ms) < 1e-14
    f = CoupledField.from_bulk(bulk_xy(g, lambda x, y: y))
    mb, _ = means(g, f)
    assert mb == pytest.approx(0.5, abs=1e-14)


def test_inner_L2_examples(g):
    one = CoupledField.constant(g, 1.0)
    assert inner_L2(g, one, one) == pytest.approx(3.0 * g.lx, rel=1e-14)
    a = CoupledField.from_bulk(bulk_xy(g, lambda x, y: np.cos(2 * np.pi * x / g.lx)))
    b = CoupledField.from_bulk(bulk_xy(g, lambda x, y: np.cos(4 * np.pi * x / g.lx)))
    assert abs(inner_L2(g, a, b)) < 1e-12
    rng = np.random.default_rng(7)
    a = CoupledField(rng.standard_normal((g.nx, g.ny)), rng.standard_normal((2, g.nx)))
    b = CoupledField(rng.standard_normal((g.nx, g.ny)), rng.standard_normal((2, g.nx)))
    na = np.sqrt(inner_L2(g, a, a))
    nb = np.sqrt(inner_L2(g, b, b))
    assert abs(inner_L2(g, a, b)) <= na * nb * (1.0 + 1e-12)


def test_coupled_field_conformity(g):
    f = CoupledField.from_bulk(random_bulk(g))
    assert f.conformity_gap() == 0.0
    f.surf[0, 0] += 1.0
    assert f.conformity_gap() == 1.0


def test_coupled_field_arithmetic(g):
    a = CoupledField.from_bulk(random_bulk(g, 1))
    b = CoupledField.from_bulk(random_bulk(g, 2))
    c = 2.0 * (a - b) + b
    np.testing.assert_allclose(c.bulk, 2 * a.bulk - b.bulk)
    np.testing.assert_allclose(c.surf, 2 * a.surf - b.surf)
