from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupmomentum import systems
from groupmomentum.errors import AdjointMismatch, ChartBoundary, ConstraintViolation, PreconditionFailed
from groupmomentum.lie_core import (
    VectorGroupModel,
    circle_group,
    commutator,
    skew_basis,
    sl2_generators,
    sl2_pairing,
    sp_basis,
    sp_pairing,
    standard_symplectic,
    vector_pairing,
)
from groupmomentum.momentum import (
    Hamiltonian,
    MomentumComponent,
    SymplecticSample,
    circle_momentum_residual,
    cocycle_identity_residual,
    dual_map,
    extension_momentum,
    invariance_residual,
    lift_momentum,
    momentum_residual,
    momentum_residual_basis,
    noether_drift,
    noether_report,
    nonequivariance_cocycle,
    poisson_map_residual,
    subgroup_momentum,
)
from groupmomentum.orbits import kks_structure_pi, orbit_system

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def linear_system(matrix: np.ndarray, point) -> SymplecticSample:
    """R^2 with a linear one-parameter action generated by ``matrix``."""
    import scipy.linalg

    w = standard_symplectic(1)
    return SymplecticSample(
        point=point, omega=w,
        action=lambda g, z: scipy.linalg.expm(float(np.ravel(g)[0]) * matrix) @ z,
        inf_action=lambda a, z: float(np.ravel(a)[0]) * matrix @ z,
        momentum=lambda z: np.array([0.0]),
        group=VectorGroupModel(1), dual_group=VectorGroupModel(1), name="linear")


# -- samples ----------------------------------------------------------------


def test_sample_rejects_bad_omega():
    ex = systems.symplectic_vector_space()
    with pytest.raises(ConstraintViolation):
        replace(ex.sample, omega=np.eye(2))
    with pytest.raises(ConstraintViolation):
        replace(ex.sample, omega=np.zeros((2, 2)))
    assert ex.sample.omega_condition == pytest.approx(1.0)


@pytest.mark.parametrize("factory", [
    lambda: systems.symplectic_vector_space([0.3, -0.2]),
    lambda: systems.matrix_space_sp(np.random.default_rng(0).normal(size=(4, 4))),
    lambda: systems.matrix_space_o(np.random.default_rng(0).normal(size=(4, 4))),
    lambda: orbit_system("elliptic", 1.3),
    lambda: orbit_system("hyperbolic", 0.7),
    lambda: orbit_system("parabolic_plus"),
])
def test_inf_action_matches_action(factory):
    ex = factory()
    assert max(ex.sample.inf_action_residual(b) for b in ex.basis) < 1e-6


# -- defining relation ------------------------------------------------------


def test_vector_space_translation_momentum():
    ex = systems.symplectic_vector_space([0.3, -0.2])
    assert momentum_residual_basis(ex.sample, ex.pairing) < 1e-8


def test_vector_space_wrong_momentum_defect_is_omega():
    ex = systems.symplectic_vector_space([0.3, -0.2], scale=2.0)
    # J = 2 omega(v, .) leaves the defect omega(A, X); unit A, X give 1.
    assert momentum_residual_basis(ex.sample, ex.pairing) == pytest.approx(1.0, abs=1e-8)


@given(seeds)
def test_matrix_dual_pair_momenta(seed):
    x = np.random.default_rng(seed).normal(size=(4, 4))
    for ex in (systems.matrix_space_sp(x), systems.matrix_space_o(x)):
        assert momentum_residual_basis(ex.sample, ex.pairing) < 1e-6


@pytest.mark.parametrize("kind,lam", [("elliptic", 1.3), ("elliptic", -0.6), ("hyperbolic", 0.7),
                                      ("parabolic_plus", 0.0), ("parabolic_minus", 0.0)])
def test_orbit_momentum(kind, lam):
    ex = orbit_system(kind, lam)
    assert momentum_residual_basis(ex.sample, ex.pairing, 1e-5, ex.basis) < 1e-6


def test_residual_second_order_in_step():
    # On the elliptic orbit chart the central-difference error dominates at large steps.
    ex = orbit_system("elliptic", 1.3, point=(0.4, 0.3))
    r1 = momentum_residual_basis(ex.sample, ex.pairing, 2e-2, ex.basis)
    r2 = momentum_residual_basis(ex.sample, ex.pairing, 1e-2, ex.basis)
    assert 3.5 < r1 / r2 < 4.5


def test_chart_boundary():
    ex = systems.symplectic_vector_space()
    bad = replace(ex.sample, momentum=lambda v: np.full(2, np.nan))
    with pytest.raises(ChartBoundary):
        momentum_residual(bad, np.array([1.0, 0.0]), ex.pairing)


def test_circle_valued_momenta():
    assert circle_momentum_residual(systems.circle_torus()) < 1e-8
    assert circle_momentum_residual(systems.circle_torus(trivial=True)) == 0.0
    assert circle_momentum_residual(systems.symplectic_torus_circle()) < 1e-8
    assert circle_momentum_residual(systems.lattice_quotient_r4()) < 1e-8


def test_torus_momentum_across_sample_points():
    ex = systems.symplectic_torus()
    for p in ([0.15, 0.2], [0.5, 0.85], [0.8, 0.45]):
        assert momentum_residual_basis(ex.sample.at(p), ex.pairing) < 1e-8


# -- Noether ------------------------------------------------------------------


def test_harmonic_oscillator_drift():
    s = systems.sheared_oscillator([1.0, 0.0], 0.0)
    assert noether_drift(s, systems.sheared_oscillator_hamiltonian(0.0), 10.0, 1e-3) < 1e-10


def test_constant_hamiltonian_zero_drift():
    s = systems.t4_system()
    assert noether_drift(s, lambda z: 1.0, 1.0, 1e-2) == 0.0


def test_lattice_quotient_quartic_drift():
    s = systems.lattice_quotient_r4()
    ham = systems.quartic_lattice_hamiltonian()
    rep = noether_report(s, ham, 10.0, 1e-3, (np.array([1.0]),))
    assert rep.drift < 1e-7
    assert rep.invariance_residual == 0.0


def test_quartic_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    for ham, dim in ((systems.quartic_lattice_hamiltonian(), 4), (systems.o_invariant_quartic(4), 16),
                     (systems.sp_invariant_quartic(4), 16), (systems.sheared_oscillator_hamiltonian(0.3), 2)):
        z = rng.normal(size=dim)
        fd = np.array([(ham(z + 1e-6 * e) - ham(z - 1e-6 * e)) / 2e-6 for e in np.eye(dim)])
        assert np.max(np.abs(fd - ham.grad(z))) < 1e-6 * max(1.0, np.max(np.abs(fd)))


def test_matrix_quartics_are_invariant():
    x = 0.5 * np.random.default_rng(4).normal(size=(4, 4))
    o_sys, sp_sys = systems.matrix_space_o(x), systems.matrix_space_sp(x)
    assert invariance_residual(o_sys.sample, systems.o_invariant_quartic(4), o_sys.basis) < 1e-12
    assert invariance_residual(sp_sys.sample, systems.sp_invariant_quartic(4), sp_sys.basis) < 1e-12


def test_sheared_drift_second_order():
    s = systems.sheared_oscillator([1.0, 0.0], 0.02)
    ham = systems.sheared_oscillator_hamiltonian(0.02)
    coarse = noether_drift(s, ham, 10.0, 1e-3)
    fine = noether_drift(s, ham, 10.0, 5e-4)
    assert coarse < 1e-8
    assert 3.5 <= coarse / fine <= 4.5


def test_hamiltonian_requires_callable_gradient_or_fd():
    ham = Hamiltonian(lambda z: 0.5 * float(z @ z))
    np.testing.assert_allclose(ham.grad(np.array([1.0, -2.0])), [1.0, -2.0], atol=1e-8)


# -- cocycles and Poisson maps ---------------------------------------------


def test_cocycle_at_fixed_point_vanishes():
    s = linear_system(np.array([[0.0, 1.0], [-1.0, 0.0]]), [0.0, 0.0])
    np.testing.assert_array_equal(nonequivariance_cocycle(s, [np.array([1.0])]).bilinear_matrix, 0.0)


def test_symplectic_torus_cocycle_is_omega():
    ex = systems.symplectic_torus()
    sigma = nonequivariance_cocycle(ex.sample, ex.basis).bilinear_matrix
    np.testing.assert_allclose(sigma, standard_symplectic(1), atol=1e-15)


@given(seeds)
def test_cocycle_matches_direct_evaluation(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(4, 4))
    ex = systems.matrix_space_sp(x)
    sigma = nonequivariance_cocycle(ex.sample, ex.basis[:4]).bilinear_matrix
    assert np.max(np.abs(sigma + sigma.T)) < 1e-14
    w = systems.matrix_space_omega(2)
    direct = np.array([[(a @ x).reshape(-1) @ w @ (b @ x).reshape(-1) for b in ex.basis[:4]]
                       for a in ex.basis[:4]])
    np.testing.assert_allclose(sigma, direct, atol=1e-12)


def test_cocycle_identity_on_orbit_action():
    ex = orbit_system("hyperbolic", 0.9)
    assert cocycle_identity_residual(ex.sample, list(sl2_generators()), commutator) < 1e-8


def test_orbit_momentum_is_poisson_for_kks():
    for kind, lam in (("elliptic", 1.3), ("hyperbolic", 0.7), ("parabolic_minus", 0.0)):
        ex = orbit_system(kind, lam)
        # J = -nu is a Poisson map into sl(2)* with the KKS structure pi(mu, A) = [mu, A].
        assert poisson_map_residual(ex.sample, kks_structure_pi, ex.basis, ex.pairing) < 1e-8


def test_trivial_structure_residual_equals_cocycle():
    ex = systems.symplectic_torus()
    r = poisson_map_residual(ex.sample, lambda eta, a: np.zeros(2), ex.basis, ex.pairing)
    assert r == pytest.approx(np.max(np.abs(nonequivariance_cocycle(ex.sample, ex.basis).bilinear_matrix)))


# -- extensions, lifts and subgroups ---------------------------------------


def _product_plane_system():
    """R^2 x R^2 with translations of the first factor and rotations of the second."""
    w = standard_symplectic(1)
    big = np.zeros((4, 4))
    big[:2, :2] = w
    big[2:, 2:] = w
    rot = np.array([[0.0, 1.0], [-1.0, 0.0]])

    def inf(a, z):
        a = np.asarray(a, dtype=float).reshape(-1)
        return np.concatenate([a[:2], a[2] * rot @ z[2:]])

    return SymplecticSample(
        point=[0.3, -0.4, 0.8, 0.1], omega=big,
        action=lambda g, z: z, inf_action=inf, momentum=lambda z: np.zeros(3),
        group=VectorGroupModel(3), dual_group=VectorGroupModel(3), name="product-plane")


def _components():
    w = standard_symplectic(1)
    trans = MomentumComponent(lambda z: z[:2] @ w, vector_pairing(2),
                              lambda a: np.concatenate([np.asarray(a, float), [0.0]]), VectorGroupModel(2))
    # the rotation with generator [[0, 1], [-1, 0]] has momentum -|z|^2 / 2
    rot = MomentumComponent(lambda z: np.array([-0.5 * float(z[2:] @ z[2:])]), vector_pairing(1),
                            lambda a: np.array([0.0, 0.0, float(np.ravel(a)[0])]), VectorGroupModel(1))
    return trans, rot


def test_extension_of_product_is_max_of_parts():
    sys = _product_plane_system()
    trans, rot = _components()
    ext = extension_momentum(sys, trans, rot)
    assert ext.basis_residual(sys) <= max(ext.part_residuals) + 1e-12
    assert ext.residual(sys, [np.array([0.4, -1.1]), np.array([0.7])]) < 1e-8


def test_extension_rejects_bad_component():
    sys = _product_plane_system()
    trans, rot = _components()
    bad = replace(rot, momentum=lambda z: np.array([float(z[2:] @ z[2:])]))
    with pytest.raises(PreconditionFailed):
        extension_momentum(sys, trans, bad)


def test_lift_independent_of_splitting():
    circle = circle_group()
    j_h = lambda z: np.array([z[0] ** 2 + z[1]])
    tau = lambda xi: 0.5 * np.asarray(xi)
    sigma1 = lambda z: np.array([0.3 * z[1]])
    # a second splitting differs by a character of the dual group: an integer shift
    sigma2 = lambda z: np.array([0.3 * z[1] + 2.0])
    lift1 = lift_momentum(sigma1, j_h, tau, circle)
    lift2 = lift_momentum(sigma2, j_h, tau, circle)
    for z in np.random.default_rng(1).normal(size=(5, 2)):
        assert circle.distance(lift1(z), lift2(z)) < 1e-8


def test_subgroup_identity_and_rotation_subgroup():
    x = np.random.default_rng(9).normal(size=(2, 2))
    ex = systems.matrix_space_sp(x)
    same = subgroup_momentum(ex.sample.momentum, lambda mu: mu, lambda a: a, ex.pairing, ex.pairing)
    assert momentum_residual_basis(replace(ex.sample, momentum=same), ex.pairing) < 1e-6
    # SO(2) inside Sp(2, R): generator h, dual projection through the pairing adjoint
    h = np.array([[0.0, 1.0], [-1.0, 0.0]])
    h_pairing = vector_pairing(1)
    iota = lambda a: float(np.ravel(a)[0]) * h
    rho = dual_map(iota, h_pairing, ex.pairing)
    j_h = subgroup_momentum(ex.sample.momentum, rho, iota, ex.pairing, h_pairing)
    sub = replace(ex.sample, inf_action=lambda a, v: ex.sample.inf_action(iota(a), v),
                  momentum=j_h, group=VectorGroupModel(1), dual_group=VectorGroupModel(1))
    assert momentum_residual_basis(sub, h_pairing) < 1e-6


def test_subgroup_adjoint_mismatch():
    ex = systems.matrix_space_sp(np.eye(2))
    h = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(AdjointMismatch):
        subgroup_momentum(ex.sample.momentum, lambda mu: np.array([1.0]),
                          lambda a: float(np.ravel(a)[0]) * h, ex.pairing, vector_pairing(1))


def test_diagonal_circle_on_t4_fails():
    # The diagonal circle's candidate is only local: its period along psi2 is sqrt(2) mod 1.
    s = systems.t4_system(dual="R/Z")
    prod = systems.t4_product_system()
    assert circle_momentum_residual(s) < 1e-8  # the local relation holds ...
    from groupmomentum.periods import build_primitive, existence_verdict, torus_generators
    from groupmomentum.lie_core import circle_pairing
    verdict = existence_verdict(build_primitive(s, circle_pairing()), torus_generators(s.point), circle_group())
    assert verdict.verdict == "OBSTRUCTED"  # ... but the period obstruction is non-trivial
    assert prod.dim == 4
