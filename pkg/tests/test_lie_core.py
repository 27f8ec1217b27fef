from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupmomentum.errors import (
    ConstraintViolation,
    InsufficientSamples,
    OutOfInjectivityRadius,
    SingularPairing,
    TagMismatch,
)
from groupmomentum.lie_core import (
    DualPairing,
    MatrixAlgebraElement,
    MatrixGroupElement,
    adjoint,
    circle_group,
    coadjoint,
    commutator,
    entries,
    exp_matrix,
    group_residual,
    half_trace,
    infinitesimal_coadjoint,
    iwasawa_pairing,
    log_derivative,
    log_matrix,
    o_pairing,
    random_algebra,
    rotation,
    sl2_generators,
    sl2_pairing,
    sp_pairing,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
E_PLUS, E_MINUS, H = sl2_generators()


def taylor_exp(a: np.ndarray, terms: int = 60) -> np.ndarray:
    """Scaling-and-squaring with a plain Taylor series (independent oracle)."""
    k = 0
    while np.linalg.norm(a) / 2**k >= 1e-3:
        k += 1
    x = a / 2**k
    out = np.eye(a.shape[0], dtype=a.dtype)
    term = np.eye(a.shape[0], dtype=a.dtype)
    for j in range(1, terms):
        term = term @ x / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


# -- typed elements ---------------------------------------------------------


def test_algebra_element_rejects_constraint_violation():
    with pytest.raises(ConstraintViolation):
        MatrixAlgebraElement(np.eye(2), "sl2R")
    with pytest.raises(TagMismatch):
        MatrixAlgebraElement(np.zeros((2, 2)), "nonsense")
    with pytest.raises(ConstraintViolation):
        MatrixAlgebraElement(np.zeros((3, 3)), "sl2R")


def test_group_element_rejects_wrong_determinant():
    with pytest.raises(ConstraintViolation):
        MatrixGroupElement(2 * np.eye(2), "sl2R")
    g = MatrixGroupElement(rotation(0.4), "so2")
    assert g.dim == 2
    assert not g.entries.flags.writeable


# -- exponential and logarithm ---------------------------------------------


def test_exp_of_zero_is_identity():
    g = exp_matrix(MatrixAlgebraElement(np.zeros((2, 2)), "sl2R"))
    np.testing.assert_array_equal(g.entries, np.eye(2))


def test_exp_quarter_turn():
    g = exp_matrix(MatrixAlgebraElement(math.pi / 2 * H, "sl2R"))
    np.testing.assert_allclose(g.entries, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-15)


@given(seeds)
def test_exp_matches_taylor_oracle_and_unit_determinant(seed):
    rng = np.random.default_rng(seed)
    a = random_algebra("sl2R", 2, rng)
    g = exp_matrix(MatrixAlgebraElement(a, "sl2R"))
    assert abs(np.linalg.det(g.entries) - 1.0) < 1e-12 * max(1.0, np.linalg.norm(g.entries) ** 2)
    ref = taylor_exp(a)
    # the squaring phase of the oracle amplifies round-off to a few 1e-12
    assert np.max(np.abs(g.entries - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_log_of_identity_and_rotation():
    assert np.max(np.abs(entries(log_matrix(np.eye(2))))) < 1e-15
    np.testing.assert_allclose(log_matrix(rotation(0.3)), 0.3 * H, atol=1e-14)


def test_log_outside_injectivity_radius():
    with pytest.raises(OutOfInjectivityRadius):
        log_matrix(rotation(3.0))


@pytest.mark.parametrize("tag,n", [("sl2R", 2), ("sp2nR", 4), ("su_n", 2), ("o_n", 3), ("b_n", 2)])
def test_exp_log_round_trip(tag, n):
    rng = np.random.default_rng(7)
    for _ in range(100):
        a = random_algebra(tag, n, rng)
        a = 0.45 * a / max(np.linalg.norm(a, 2), 1e-300) * rng.uniform(0.05, 1.0)
        g = exp_matrix(MatrixAlgebraElement(a, tag))
        assert group_residual(tag, g.entries) < 1e-10
        back = log_matrix(g)
        assert np.max(np.abs(entries(back) - a)) < 1e-9


# -- adjoint and coadjoint --------------------------------------------------


def test_adjoint_identity_and_trace():
    a = MatrixAlgebraElement(H, "sl2R")
    np.testing.assert_allclose(adjoint(np.eye(2), a).entries, H)
    g = exp_matrix(MatrixAlgebraElement(0.7 * E_PLUS, "sl2R"))
    ad = adjoint(g, a)
    assert abs(np.trace(ad.entries)) < 1e-12
    np.testing.assert_allclose(ad.entries, g.entries @ H @ np.linalg.inv(g.entries), atol=1e-15)


def test_adjoint_tag_mismatch():
    with pytest.raises(TagMismatch):
        adjoint(MatrixGroupElement(rotation(0.2), "so2"), MatrixAlgebraElement(H, "sl2R"))


@given(seeds)
def test_adjoint_is_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g1, g2 = (exp_matrix(random_algebra("sl2R", 2, rng, 0.7)) for _ in range(2))
    a = random_algebra("sl2R", 2, rng)
    lhs = adjoint(g1 @ g2, a)
    rhs = adjoint(g1, adjoint(g2, a))
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(lhs)))


def test_sl2_pairing_signature_and_commutators():
    p = sl2_pairing()
    np.testing.assert_allclose(p.gram, np.diag([1.0, 1.0, -1.0]), atol=1e-15)
    np.testing.assert_allclose(commutator(H, E_PLUS), -2 * E_MINUS)
    np.testing.assert_allclose(commutator(H, E_MINUS), 2 * E_PLUS)
    np.testing.assert_allclose(commutator(E_PLUS, E_MINUS), 2 * H)


def test_singular_pairing_rejected():
    with pytest.raises(SingularPairing):
        DualPairing(lambda a, b: 0.0, (np.eye(1),), (np.eye(1),))


@given(seeds)
def test_pairing_bilinearity(seed):
    rng = np.random.default_rng(seed)
    for p in (sl2_pairing(), sp_pairing(2), o_pairing(4), iwasawa_pairing()):
        assert p.bilinearity_residual(rng, 5) < 1e-12


def test_coadjoint_identity():
    p = sl2_pairing()
    mu = MatrixAlgebraElement(0.3 * E_PLUS - 1.2 * H, "sl2R")
    np.testing.assert_allclose(coadjoint(np.eye(2), mu, p).entries, mu.entries, atol=1e-15)


@given(seeds)
def test_coadjoint_defining_relation(seed):
    rng = np.random.default_rng(seed)
    for p, tag, n in ((sl2_pairing(), "sl2R", 2), (iwasawa_pairing(), "su_n", 2)):
        g = exp_matrix(random_algebra(tag, n, rng, 0.8))
        mu = p.right_from_coords(rng.normal(size=p.dim))
        nu = coadjoint(g, mu, p)
        worst = max(abs(p(a, nu) - p(g @ a @ np.linalg.inv(g), mu)) for a in p.basis_left)
        assert worst < 1e-10


def test_coadjoint_on_sl2_is_inverse_adjoint():
    # For the invariant trace pairing, Coad_g mu = Ad_{g^-1} mu.
    rng = np.random.default_rng(3)
    p = sl2_pairing()
    g = exp_matrix(random_algebra("sl2R", 2, rng))
    mu = random_algebra("sl2R", 2, rng)
    np.testing.assert_allclose(coadjoint(g, mu, p), np.linalg.inv(g) @ mu @ g, atol=1e-12)


def test_infinitesimal_coadjoint_is_derivative():
    rng = np.random.default_rng(5)
    p = sl2_pairing()
    b = random_algebra("sl2R", 2, rng)
    mu = random_algebra("sl2R", 2, rng)
    step = 1e-5
    deriv = (coadjoint(exp_matrix(step * b), mu, p) - coadjoint(exp_matrix(-step * b), mu, p)) / (2 * step)
    assert np.max(np.abs(deriv - infinitesimal_coadjoint(b, mu, p))) < 1e-6


def test_infinitesimal_coadjoint_examples():
    p = sl2_pairing()
    assert np.max(np.abs(infinitesimal_coadjoint(np.zeros((2, 2)), E_PLUS, p))) == 0.0
    nu = infinitesimal_coadjoint(H, E_PLUS, p)
    worst = max(abs(p(b, nu) - p(commutator(H, b), E_PLUS)) for b in p.basis_left)
    assert worst < 1e-12


@given(seeds)
def test_infinitesimal_coadjoint_antisymmetry(seed):
    # kappa(A, coad_A mu) = kappa([A, A], mu) = 0
    rng = np.random.default_rng(seed)
    p = sl2_pairing()
    a, mu = random_algebra("sl2R", 2, rng), random_algebra("sl2R", 2, rng)
    assert abs(p(a, infinitesimal_coadjoint(a, mu, p))) < 1e-12


# -- logarithmic derivative -------------------------------------------------


def test_log_derivative_constant_and_one_parameter_subgroup():
    rng = np.random.default_rng(11)
    a = random_algebra("sl2R", 2, rng)
    g0 = exp_matrix(random_algebra("sl2R", 2, rng))
    assert np.max(np.abs(log_derivative(lambda t: g0, 0.3))) == 0.0
    d = log_derivative(lambda t: g0 @ exp_matrix(t * a), 0.4)
    assert np.max(np.abs(d - a)) < 1e-8


def test_log_derivative_typed_and_sampled():
    a = MatrixAlgebraElement(0.8 * H + 0.3 * E_MINUS, "sl2R")
    d = log_derivative(lambda t: exp_matrix(MatrixAlgebraElement(t * a.entries, "sl2R")), 0.1)
    assert isinstance(d, MatrixAlgebraElement)
    ts = np.linspace(0.0, 0.01, 11)
    samples = [exp_matrix(t * a.entries) for t in ts]
    np.testing.assert_allclose(log_derivative((ts, samples), ts[5]), a.entries, atol=1e-8)


def test_log_derivative_insufficient_samples():
    with pytest.raises(InsufficientSamples):
        log_derivative(lambda t: rotation(t), 0.0, step=1e-2)
    ts = np.linspace(0.0, 1e-3, 3)
    with pytest.raises(InsufficientSamples):
        log_derivative((ts, [rotation(t) for t in ts]), ts[1])


def test_log_derivative_circle_product_rule():
    # For commutative (circle-valued) curves delta(fg) = delta f + delta g.
    circle = circle_group()
    f = lambda t: np.array([0.3 * t ** 2 + 0.1 * math.sin(t)])
    g = lambda t: np.array([2.0 * t + 0.95])
    fg = lambda t: circle.mul(f(t), g(t))
    t = 0.7
    lhs = log_derivative(fg, t, group=circle)
    rhs = log_derivative(f, t, group=circle) + log_derivative(g, t, group=circle)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_half_trace_is_real():
    assert isinstance(half_trace(H, H), float)
