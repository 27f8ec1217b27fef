from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupmomentum.errors import DimensionMismatch, NotClosedForm, ShapeMismatch
from groupmomentum.forms import calculus, fluid
from groupmomentum.forms.grid import DiscreteFormField, Grid, SectionGrid, VectorFieldGrid
from groupmomentum.periods import LoopPath

CUBE = Grid.cube(16)
VOLUME = (2 * math.pi) ** 3


# -- helicity --------------------------------------------------------------------------


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=15)
def test_abc_helicity_matches_beltrami_oracle(a, b, c):
    # curl v = v, so Hel = int |v|^2 = (A^2 + B^2 + C^2) vol
    hel = fluid.helicity(fluid.abc_velocity(CUBE, a, b, c))
    assert hel == pytest.approx((a * a + b * b + c * c) * VOLUME, rel=1e-10, abs=1e-9)


def test_helicity_is_quadratic():
    v = fluid.abc_velocity(CUBE, 1.0, 0.5, -0.3)
    assert fluid.helicity(2.0 * v) == pytest.approx(4 * fluid.helicity(v), rel=1e-12)
    assert fluid.helicity(v, metric=[1.0, 1.0, 1.0]) == pytest.approx(fluid.helicity(v), rel=1e-14)


def test_gradient_field_has_no_helicity():
    x, y, z = CUBE.coords()
    v = VectorFieldGrid(CUBE, calculus.gradient(np.sin(x + 2 * y) * np.cos(z), CUBE).data)
    assert abs(fluid.helicity(v)) < 1e-10


def test_classical_clebsch_fields_have_no_helicity():
    from groupmomentum.experiments import classical_clebsch_examples

    for v in classical_clebsch_examples(Grid.cube(32)):
        assert abs(fluid.helicity(v)) < 1e-8


def test_helicity_needs_three_dimensions():
    g = Grid.cube(8, 2)
    with pytest.raises(DimensionMismatch):
        fluid.helicity(VectorFieldGrid.constant(g, [1.0, 0.0]))
    with pytest.raises(DimensionMismatch):
        fluid.abc_velocity(g)


def test_closed_form_shift_leaves_helicity_unchanged():
    v_flat = fluid.abc_velocity(CUBE, 1.0, 0.7, 0.2).flat()
    nu = fluid.harmonic_form(CUBE, [1.0, -2.0, 3.0])
    terms = fluid.helicity_cross_terms(v_flat, nu)
    assert abs(terms["v_dnu"]) < 1e-12 and abs(terms["nu_dnu"]) < 1e-12
    assert abs(terms["nu_dv"]) < 1e-10
    shifted = fluid.helicity_of_form(v_flat + nu)
    assert shifted == pytest.approx(fluid.helicity_of_form(v_flat), rel=1e-12)


def test_harmonic_form_periods():
    nu = fluid.harmonic_form(CUBE, [1.0, -2.0, 3.0])
    np.testing.assert_allclose([nu.component((i,))[0, 0, 0] * 2 * math.pi for i in range(3)], [1.0, -2.0, 3.0])
    with pytest.raises(ShapeMismatch):
        fluid.harmonic_form(CUBE, [1.0])


# -- classical Clebsch --------------------------------------------------------------------


def test_abc_clebsch_identity_on_covering_chart():
    g = Grid.cube(48)
    report = fluid.clebsch_report(fluid.abc_velocity(g, 1.0), *fluid.abc_clebsch_triple(g))
    assert report.interior < 1e-8
    # the potentials are not periodic: differentiating them as periodic data fails
    assert report.seam > 1.0
    assert report.full >= report.interior


def test_clebsch_zero_case_and_perturbation():
    g = Grid.cube(32)
    zero = np.zeros(g.shape)
    assert fluid.clebsch_residual(VectorFieldGrid.constant(g, [0, 0, 0]), zero, zero, zero) == 0.0
    f, gg, h = fluid.abc_clebsch_triple(g)
    x, _, _ = g.coords()
    eps = 1e-3
    r = fluid.clebsch_residual(fluid.abc_velocity(g, 1.0), f, gg, h + eps * np.sin(x))
    # the defect is |d(eps sin x)| = eps, up to interior sampling
    assert r == pytest.approx(eps, rel=1e-2)


# -- Hopf-type field -------------------------------------------------------------------------


def test_hopf_helicity_is_one():
    hf = fluid.hopf_field(Grid.cube(32))
    assert fluid.helicity(hf.velocity()) == pytest.approx(1.0, abs=1e-3)
    np.testing.assert_allclose(np.linalg.norm(hf.lift, axis=-1), 1.0, atol=1e-14)


def test_hopf_curvature_identity_converges():
    r24 = fluid.hopf_curvature_residual(fluid.hopf_field(Grid.cube(24)))
    r48 = fluid.hopf_curvature_residual(fluid.hopf_field(Grid.cube(48)))
    assert r48 < r24 / 10


def test_hopf_projection_lands_on_sphere():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(50, 4))
    z /= np.linalg.norm(z, axis=-1, keepdims=True)
    np.testing.assert_allclose(np.linalg.norm(fluid.hopf_projection(z), axis=-1), 1.0, atol=1e-14)


def test_generalized_clebsch():
    g = Grid.cube(16)
    hf = fluid.hopf_field(g)
    v = hf.velocity()
    assert fluid.generalized_clebsch_residual(v, hf.phi, hf.theta) == 0.0
    nu = fluid.harmonic_form(g, [1.0, 0.0, 0.5])
    shifted = VectorFieldGrid(g, v.data + nu.data)
    assert fluid.generalized_clebsch_residual(shifted, hf.phi, hf.theta, nu) < 1e-15
    x, y, z = g.coords()
    not_closed = DiscreteFormField.from_components(g, 1, {(0,): np.sin(y)})
    with pytest.raises(NotClosedForm):
        fluid.generalized_clebsch_residual(v, hf.phi, hf.theta, not_closed)
    with pytest.raises(ShapeMismatch):
        fluid.generalized_clebsch_residual(v, hf.phi, DiscreteFormField.zeros(g, 2))
    with pytest.raises(ShapeMismatch):
        fluid.generalized_clebsch_residual(v, SectionGrid(g, hf.lift), hf.theta)


# -- Liouville class --------------------------------------------------------------------------


def _canonical(point):
    """``theta = p dq`` on the chart ``(q, p)``."""
    return np.array([point[1], 0.0])


def test_liouville_class_of_graphs():
    straight = LoopPath.straight([0.0, 0.7], [1.0, 0.0], 64)
    assert fluid.liouville_class(straight, _canonical) == pytest.approx(0.7, abs=1e-14)
    wavy = LoopPath.from_function(lambda t: [t, 0.7 + 0.1 * math.sin(2 * math.pi * t)], 64, [1.0, 0.0])
    assert fluid.liouville_class(wavy, _canonical, "spectral") == pytest.approx(0.7, abs=1e-14)
    assert fluid.liouville_class(wavy, _canonical, "polyline") == pytest.approx(0.7, abs=1e-12)
    both = fluid.liouville_class([straight, wavy], _canonical)
    np.testing.assert_allclose(both, [0.7, 0.7], atol=1e-14)


def test_liouville_class_of_contractible_circle_is_area():
    r = 0.3
    circle = LoopPath.from_function(lambda t: [r * math.cos(2 * math.pi * t), r * math.sin(2 * math.pi * t)], 64)
    # int p dq over a counter-clockwise circle is minus the enclosed area
    assert fluid.liouville_class(circle, _canonical) == pytest.approx(-math.pi * r * r, abs=1e-14)
    warped = circle.reparametrize(lambda t: t ** 2)
    with pytest.raises(ShapeMismatch):
        fluid.liouville_class(warped, _canonical, "spectral")
    assert fluid.liouville_class(warped, _canonical) == pytest.approx(-math.pi * r * r, rel=1e-2)
