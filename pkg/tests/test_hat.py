from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg

from groupmomentum.errors import ConstraintViolation, DegreeMismatch, DimensionMismatch, ShapeMismatch
from groupmomentum.experiments import hat_identity_residuals, hat_test_data
from groupmomentum.forms import hat
from groupmomentum.forms.grid import DiscreteFormField, Grid, SectionGrid
from groupmomentum.momentum import momentum_residual


@pytest.fixture(scope="module")
def data():
    return hat_test_data(24)


# -- hat products --------------------------------------------------------------------------


def test_hat_product_is_antisymmetric(data):
    y1, y2 = data["ys"]
    a = hat.hat_product_eval(data["mu"], data["omega"], data["phi"], [y1, y2])
    b = hat.hat_product_eval(data["mu"], data["omega"], data["phi"], [y2, y1])
    assert abs(a) > 1e-3
    assert a == pytest.approx(-b, abs=1e-12)
    assert hat.hat_product_eval(data["mu"], data["omega"], data["phi"], [y1, y1]) == pytest.approx(0, abs=1e-12)


def test_hat_product_ignores_horizontal_components(data):
    y1, y2 = data["ys"]
    base = data["omega"]

    def junk(p, v):
        comps = np.array(base.func(p, v), dtype=float)
        comps[..., 0] += 5.0 + np.sin(p[..., 0]) * v[..., 1]  # the dx ^ dy component
        return comps

    noisy = hat.TotalSpaceForm(2, 2, 2, junk)
    a = hat.hat_product_eval(data["mu"], base, data["phi"], [y1, y2])
    b = hat.hat_product_eval(data["mu"], noisy, data["phi"], [y1, y2])
    assert a == pytest.approx(b, abs=1e-12)


def test_top_degree_hat_is_the_section_symplectic_form(data):
    y1, y2 = data["ys"]
    phi = data["phi"]

    def vertical_matrix(values):
        c = 1.0 + values[..., 0] ** 2  # the (fiber, fiber) component of omega
        out = np.zeros(values.shape[:-1] + (2, 2))
        out[..., 0, 1], out[..., 1, 0] = c, -c
        return out

    direct = hat.hat_symplectic_eval(phi, y1, y2, vertical_matrix, data["mu"])
    assert hat.hat_product_eval(data["mu"], data["omega"], phi, [y1, y2]) == pytest.approx(direct, rel=1e-12)


def test_hat_degree_checks(data):
    with pytest.raises(DegreeMismatch):
        hat.hat_product_eval(data["mu"], data["omega"], data["phi"], [data["ys"][0]])
    with pytest.raises(DegreeMismatch):
        data["omega"].contract([1.0, 0.0, 0.0, 0.0]).contract([0.0, 1.0, 0.0, 0.0]).contract([0, 0, 1.0, 0])
    with pytest.raises(ShapeMismatch):
        data["omega"].contract([1.0, 0.0])


def test_hat_identities():
    res = hat_identity_residuals(24)
    assert max(res.values()) < 1e-7, res


def test_section_form_rejects_symmetric_fiber_form(data):
    with pytest.raises(ConstraintViolation):
        hat.hat_symplectic_eval(data["phi"], data["ys"][0], data["ys"][1],
                                lambda v: np.broadcast_to(np.eye(2), v.shape[:-1] + (2, 2)), data["mu"])
    with pytest.raises(DegreeMismatch):
        hat.hat_symplectic_eval(data["phi"], data["ys"][0], data["ys"][1],
                                lambda v: np.zeros(v.shape[:-1] + (2, 2)), data["alpha"])


# -- gauge momentum -----------------------------------------------------------------------------


def _plane_section(n):
    g = Grid.cube(n, 2)
    x, y = g.coords()
    return g, SectionGrid(g, np.stack([np.sin(x) + 0.3, np.cos(x + y)], axis=-1))


def test_gauge_momentum_defining_relation():
    g, phi = _plane_section(12)
    mu = DiscreteFormField.volume(g, 1.0 + 0.3 * np.cos(g.coords()[1]))
    out = hat.gauge_momentum_pushforward(phi, hat.plane_rotation_action(), mu, rng=np.random.default_rng(1))
    assert out.residual < 1e-6
    np.testing.assert_allclose(out.values[..., 0], 0.5 * np.sum(phi.values ** 2, axis=-1))


def test_wrong_fiber_momentum_is_detected():
    g, phi = _plane_section(8)
    action = hat.plane_rotation_action()
    wrong = hat.FiberAction(1, 2, action.generators, lambda v: np.sum(v ** 2, axis=-1)[..., None],
                            action.omega)
    out = hat.gauge_momentum_pushforward(phi, wrong, DiscreteFormField.volume(g))
    assert out.residual > 1e-2


def test_constant_gauge_matches_product_system():
    g, phi = _plane_section(4)
    mu = DiscreteFormField.volume(g, 1.0 + 0.1 * np.sin(g.coords()[0]))
    product = hat.product_rotation_system(phi, mu)
    const = hat.gauge_momentum_pushforward(phi, hat.plane_rotation_action(), mu,
                                           gauge_params=[np.ones(g.shape + (1,))])
    assert const.pairings[0] == pytest.approx(float(product.momentum(product.point)[0]), rel=1e-12)
    assert momentum_residual(product, np.array([1.0]), hat.product_rotation_pairing()) < 1e-6


# -- quantomorphism momentum ------------------------------------------------------------------------


SURFACE = Grid.cube(32, 2)
AREA = DiscreteFormField.volume(SURFACE)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_quantomorphism_momentum_of_constant_and_phase(k):
    x, y = SURFACE.coords()
    const = hat.quantomorphism_momentum(SectionGrid(SURFACE, np.full(SURFACE.shape, 0.5 + 0.5j), "C"), k, AREA)
    np.testing.assert_allclose(const.component((0, 1)), -2 * k * 0.5, atol=1e-14)
    # phi = e^{ix}: d phi ^ d conj(phi) = 0 and |phi| = 1
    phase = hat.quantomorphism_momentum(SectionGrid(SURFACE, np.exp(1j * x), "C"), k, AREA)
    np.testing.assert_allclose(phase.component((0, 1)), -2 * k, atol=1e-12)


def test_quantomorphism_momentum_two_mode_oracle():
    x, y = SURFACE.coords()
    z = np.exp(1j * x) + np.exp(1j * y)
    out = hat.quantomorphism_momentum(SectionGrid(SURFACE, z, "C"), 1, AREA)
    # (i/2) d phi ^ d conj(phi) = -sin(x - y) dx ^ dy
    np.testing.assert_allclose(out.component((0, 1)), -2 * np.abs(z) ** 2 - np.sin(x - y), atol=1e-12)


def test_quantomorphism_needs_a_surface():
    g = Grid.cube(4, 3)
    with pytest.raises(DimensionMismatch):
        hat.quantomorphism_momentum(SectionGrid(g, np.ones(g.shape, dtype=complex), "C"), 1,
                                    DiscreteFormField.zeros(g, 2))


# -- curvature -----------------------------------------------------------------------------------------


def _su2_gauge(grid):
    x, y = grid.coords()
    gens = (np.array([[1j, 0], [0, -1j]]), np.array([[0, 1], [-1, 0]], dtype=complex))
    field = np.sin(x)[..., None, None] * gens[0] + (0.5 * np.cos(y))[..., None, None] * gens[1]
    return np.array([scipy.linalg.expm(m) for m in field.reshape(-1, 2, 2)]).reshape(grid.shape + (2, 2))


def test_pure_gauge_is_flat():
    g = Grid.cube(48, 2)
    curv = hat.curvature(hat.maurer_cartan_form(_su2_gauge(g), g))
    assert curv.max_norm() < 1e-9


def test_abelian_curvature_is_the_differential():
    g = Grid.cube(16, 2)
    _, y = g.coords()
    gamma = DiscreteFormField.from_components(g, 1, {(0,): np.sin(2 * y)[..., None, None] * np.ones((1, 1))})
    np.testing.assert_allclose(hat.curvature(gamma).component((0, 1))[..., 0, 0], -2 * np.cos(2 * y), atol=1e-12)


def test_curvature_is_gauge_covariant():
    g = Grid.cube(48, 2)
    x, y = g.coords()
    a = np.array([[0, 1j], [1j, 0]])
    b = np.array([[1j, 0], [0, -1j]])
    gamma = DiscreteFormField.from_components(g, 1, {
        (0,): np.cos(y)[..., None, None] * a, (1,): np.sin(x)[..., None, None] * b})
    gauge = _su2_gauge(g)
    moved = hat.curvature(hat.gauge_transform(gamma, gauge))
    expected = gauge @ hat.curvature(gamma).component((0, 1)) @ np.linalg.inv(gauge)
    assert np.max(np.abs(moved.component((0, 1)) - expected)) < 1e-9


def test_curvature_momentum_checks():
    g = Grid.cube(8, 2)
    gamma = DiscreteFormField.zeros(g, 1, (1, 1))
    out = hat.curvature_momentum(gamma, DiscreteFormField.volume(g))
    assert out.degree == 2 and out.max_norm() == 0.0
    g3 = Grid.cube(4, 3)
    with pytest.raises(DimensionMismatch):
        hat.curvature_momentum(DiscreteFormField.zeros(g3, 1, (1, 1)), DiscreteFormField.zeros(g3, 2))
    with pytest.raises(ShapeMismatch):
        hat.curvature(DiscreteFormField.zeros(g, 1))


def test_curvature_momentum_in_four_dimensions():
    g = Grid.cube(8, 4)
    x = g.coords()
    gamma = DiscreteFormField.from_components(g, 1, {(0,): np.sin(x[1])[..., None, None] * np.ones((1, 1))})
    sigma = DiscreteFormField.from_components(g, 2, {(2, 3): 1.0})
    out = hat.curvature_momentum(gamma, sigma)
    # curv = -cos(x1) dx0 ^ dx1, wedged with dx2 ^ dx3
    np.testing.assert_allclose(out.component((0, 1, 2, 3))[..., 0, 0], -np.cos(x[1]), atol=1e-12)
