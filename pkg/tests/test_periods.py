from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg

from groupmomentum import systems
from groupmomentum.errors import NoSolution, PreconditionFailed
from groupmomentum.lie_core import MatrixGroupModel, VectorGroupModel, circle_group, circle_pairing
from groupmomentum.momentum import SymplecticSample, momentum_residual_basis
from groupmomentum.orbits import orbit_system
from groupmomentum.periods import (
    LoopPath,
    PrimitiveForm,
    build_primitive,
    distance_to_identity,
    existence_verdict,
    integrate_momentum,
    maurer_cartan_residual,
    momentum_from_primitive,
    period_homomorphism,
    torus_generators,
)

SQRT2 = math.sqrt(2.0)
ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])
SL2 = MatrixGroupModel(2, "sl2R")


def _t4_primitive():
    s = systems.t4_system()
    return s, build_primitive(s, circle_pairing())


def _wave_form(x_gen, y_gen):
    """A non-abelian 1-form on the circle chart: ``(cos 2 pi p X + sin 2 pi p Y) dp``."""
    return PrimitiveForm(
        lambda p, v: v[0] * (math.cos(2 * math.pi * p[0]) * x_gen + math.sin(2 * math.pi * p[0]) * y_gen),
        1, SL2)


# -- primitive form -----------------------------------------------------------


def test_t4_primitive_components():
    s, prim = _t4_primitive()
    # alpha = d phi2 + sqrt(2) d psi2 in coordinates (phi1, phi2, psi1, psi2)
    comps = np.array([float(np.ravel(c)[0]) for c in prim.components(s.point)])
    np.testing.assert_allclose(comps, [0.0, 1.0, 0.0, SQRT2], atol=1e-15)
    assert prim.defining_residual() < 1e-12
    assert maurer_cartan_residual(prim, [s.point, s.point + 0.3]) < 1e-8


def test_non_closed_form_has_unit_maurer_cartan_defect():
    prim = PrimitiveForm(lambda p, v: np.array([p[0] * v[1]]), 2, VectorGroupModel(1))
    assert maurer_cartan_residual(prim, [np.zeros(2)]) == pytest.approx(1.0, abs=1e-8)


def test_left_invariant_form_satisfies_maurer_cartan():
    # alpha = g^-1 dg for g(s) = exp(s1 X) exp(s2 Y)
    x, y = np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])

    def alpha(p, v):
        g1 = scipy.linalg.expm(-p[1] * y)
        return v[0] * g1 @ x @ np.linalg.inv(g1) + v[1] * y

    prim = PrimitiveForm(alpha, 2, SL2)
    assert maurer_cartan_residual(prim, [np.array([0.2, -0.3]), np.array([0.5, 0.4])]) < 1e-8
    assert maurer_cartan_residual(prim, [np.array([0.2, -0.3])], VectorGroupModel((2, 2))) > 0.1


def test_defining_residual_needs_a_system():
    prim = PrimitiveForm(lambda p, v: v, 1, VectorGroupModel(1))
    with pytest.raises(PreconditionFailed):
        prim.defining_residual()


def test_nonlinear_action_has_no_primitive():
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    sys = SymplecticSample([0.2, 0.1], w, lambda g, v: v, lambda a, v: np.asarray(a, float) ** 2,
                           lambda v: np.zeros(2), VectorGroupModel(2), VectorGroupModel(2))
    with pytest.raises(NoSolution):
        build_primitive(sys, systems.vector_pairing(2))


# -- loops --------------------------------------------------------------------------


def test_loop_validation():
    with pytest.raises(PreconditionFailed):
        LoopPath([0.0, 1.0], [[0.0], [0.5]])
    with pytest.raises(PreconditionFailed):
        LoopPath([0.0, 0.0, 1.0], [[0.0], [0.1], [0.0]])
    loop = LoopPath([0.0, 1.0], [[0.0], [1.0]], winding=[1.0])
    assert loop.dim == 1 and loop.closed


def test_loop_concatenation_and_resampling():
    a = LoopPath.straight([0.1, 0.2], [1.0, 0.0], 20)
    b = LoopPath.straight([0.1, 0.2], [0.0, 1.0], 20)
    ab = a.concat(b)
    np.testing.assert_array_equal(ab.winding, [1.0, 1.0])
    assert np.all(np.diff(ab.ts) > 0)
    r = a.resample(lambda s: s ** 2, 40)
    np.testing.assert_allclose(r.points[-1] - r.points[0], [1.0, 0.0])


# -- periods and verdicts ------------------------------------------------------------


def test_t4_periods_and_verdicts():
    s, prim = _t4_primitive()
    gens = torus_generators(s.point)
    for method in ("quadrature", "rk4"):
        per = [float(np.ravel(period_homomorphism(prim, g, VectorGroupModel(1), method=method))[0])
               for g in gens]
        np.testing.assert_allclose(per, [0.0, 1.0, 0.0, SQRT2], atol=1e-10)
    real = existence_verdict(prim, gens, VectorGroupModel(1))
    circle = existence_verdict(prim, gens, circle_group())
    assert (real.verdict, real.offending) == ("OBSTRUCTED", [1, 3])
    assert (circle.verdict, circle.offending) == ("OBSTRUCTED", [3])
    assert circle.distances[3] == pytest.approx(SQRT2 - 1, abs=1e-10)
    assert circle.as_dict()["verdict"] == "OBSTRUCTED"


def test_verdict_from_covering_periods_matches_integration():
    s, prim = _t4_primitive()
    gens = torus_generators(s.point)
    real = existence_verdict(prim, gens, VectorGroupModel(1), method="rk4")
    direct = existence_verdict(prim, gens, circle_group(), method="rk4")
    lifted = existence_verdict(prim, gens, circle_group(), periods=real.periods)
    assert (lifted.verdict, lifted.offending) == (direct.verdict, direct.offending)
    np.testing.assert_allclose(lifted.distances, direct.distances, atol=1e-12)
    with pytest.raises(ValueError):
        existence_verdict(prim, gens, circle_group(), periods=real.periods[:2])


def test_no_generators_means_existence():
    _, prim = _t4_primitive()
    assert existence_verdict(prim, []).exists


def test_symplectic_torus_momentum_exists():
    ex = systems.symplectic_torus()
    prim = build_primitive(ex.sample, ex.pairing)
    verdict = existence_verdict(prim, torus_generators(ex.sample.point))
    assert verdict.exists
    # the R^2-valued periods are the lattice vectors themselves
    raw = existence_verdict(prim, torus_generators(ex.sample.point), VectorGroupModel(2))
    assert not raw.exists


def test_period_is_invariant_under_reparametrization():
    s, prim = _t4_primitive()
    loop = LoopPath.from_function(lambda t: s.point + np.array([0.0, t, 0.1 * math.sin(2 * math.pi * t), t]),
                                  400, winding=[0.0, 1.0, 0.0, 1.0])
    base = period_homomorphism(prim, loop, VectorGroupModel(1))
    warped = period_homomorphism(prim, loop.reparametrize(lambda t: t ** 2), VectorGroupModel(1))
    assert float(np.ravel(base)[0]) == pytest.approx(1 + SQRT2, abs=1e-10)
    np.testing.assert_allclose(warped, base, atol=1e-12)


def test_period_is_additive_under_concatenation():
    s, prim = _t4_primitive()
    g = torus_generators(s.point, samples=50)
    both = period_homomorphism(prim, g[1].concat(g[3]), VectorGroupModel(1))
    np.testing.assert_allclose(both, period_homomorphism(prim, g[1], VectorGroupModel(1))
                               + period_homomorphism(prim, g[3], VectorGroupModel(1)), atol=1e-12)


def test_non_abelian_periods():
    loop = LoopPath.straight([0.0], [1.0], 8)
    full = PrimitiveForm(lambda p, v: 2 * math.pi * v[0] * ROT, 1, SL2)
    half = PrimitiveForm(lambda p, v: math.pi * v[0] * ROT, 1, SL2)
    assert distance_to_identity(SL2, period_homomorphism(full, loop, dt=1e-3)) < 1e-9
    np.testing.assert_allclose(period_homomorphism(half, loop, dt=1e-3), -np.eye(2), atol=1e-9)
    assert existence_verdict(half, [loop]).offending == [0]
    with pytest.raises(PreconditionFailed):
        period_homomorphism(full, loop, method="quadrature")


def test_rk4_fourth_order_convergence():
    prim = _wave_form(np.diag([1.0, -1.0]), ROT)
    loop = LoopPath.straight([0.0], [1.0], 1)
    exact = period_homomorphism(prim, loop, dt=1e-4)
    e1 = np.max(np.abs(period_homomorphism(prim, loop, dt=0.1) - exact))
    e2 = np.max(np.abs(period_homomorphism(prim, loop, dt=0.05) - exact))
    assert 12.0 < e1 / e2 < 20.0


# -- momentum by integration ------------------------------------------------------------


def test_integrated_momentum_matches_known_momentum():
    ex = systems.symplectic_vector_space([0.3, -0.2])
    prim = build_primitive(ex.sample, ex.pairing)
    base = np.zeros(2)
    for p in ([0.3, -0.2], [1.5, 0.7]):
        np.testing.assert_allclose(integrate_momentum(prim, base, p),
                                   ex.sample.momentum(np.asarray(p)) - ex.sample.momentum(base), atol=1e-12)
    j = momentum_from_primitive(prim, base)
    from dataclasses import replace
    assert momentum_residual_basis(replace(ex.sample, momentum=j), ex.pairing) < 1e-8


def test_integrated_momentum_on_orbit_chart():
    ex = orbit_system("hyperbolic", 0.7)
    s = ex.sample
    prim = build_primitive(s, ex.pairing)
    base = np.zeros(2)
    p = np.array([0.3, 0.25])
    got = integrate_momentum(prim, base, p, samples=400)
    np.testing.assert_allclose(got, s.momentum(p) - s.momentum(base), atol=1e-5)
