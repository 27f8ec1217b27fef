from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from groupmomentum.errors import (
    ConstraintViolation,
    NotInLevelSet,
    NotPositiveDefinite,
    NotPrequantizable,
    ZeroElement,
)
from groupmomentum.lie_core import (
    commutator,
    entries,
    half_trace,
    random_algebra,
    sl2_generators,
    sl2_pairing,
    standard_symplectic,
)
from groupmomentum.orbits import (
    NEAR_DEGENERATE_BAND,
    OrbitClass,
    classify_orbit,
    eigenvalue_kind,
    is_prequantizable,
    kks_form,
    kks_matrix,
    matrix_dual_pair,
    normal_form,
    orbit_system,
    orbit_table,
    orbit_to_positive,
    prequantization_character,
    pushed_orbit_form,
    random_unitary_symplectic,
    siegel_reduction_check,
    stabilizer_basis,
    stabilizer_group_type,
)
from groupmomentum.systems import j_o, j_sp

seeds = st.integers(min_value=0, max_value=2**32 - 1)
E_PLUS, E_MINUS, H = sl2_generators()


def _random_sl2_group(rng, scale=1.0):
    return scipy.linalg.expm(random_algebra("sl2R", 2, rng, scale))


# -- classification --------------------------------------------------------------


@pytest.mark.parametrize("matrix,kind,lam", [
    (2.0 * H, "elliptic", 2.0),
    (-1.5 * H, "elliptic", -1.5),
    (np.array([[0.0, 3.0], [-0.75, 0.0]]), "elliptic", 1.5),
    (0.7 * E_MINUS, "hyperbolic", 0.7),
    (np.diag([2.0, -2.0]), "hyperbolic", 2.0),
    (np.array([[0.0, 1.0], [0.0, 0.0]]), "parabolic_plus", 0.0),
    (np.array([[0.0, 0.0], [1.0, 0.0]]), "parabolic_minus", 0.0),
    (np.array([[1.0, 1.0], [-1.0, -1.0]]), "parabolic_plus", 0.0),
])
def test_classification_examples(matrix, kind, lam):
    cls = classify_orbit(matrix)
    assert cls.kind == kind
    assert cls.lam == pytest.approx(lam, abs=1e-12)
    g = entries(cls.conjugator)
    np.testing.assert_allclose(g @ matrix @ np.linalg.inv(g), entries(cls.normal_form), atol=1e-10)
    assert abs(np.linalg.det(g) - 1) < 1e-10
    assert cls.conjugation_residual < 1e-10


def test_classification_rejects_zero_and_non_traceless():
    with pytest.raises(ZeroElement):
        classify_orbit(np.zeros((2, 2)))
    with pytest.raises(ConstraintViolation):
        classify_orbit(np.eye(2))


def test_hyperbolic_label_is_positive_for_both_signs():
    assert classify_orbit(-0.7 * E_MINUS).lam == pytest.approx(0.7)


def test_near_degenerate_flag():
    lo, hi = NEAR_DEGENERATE_BAND
    x = 10 * lo * H + np.array([[0.0, 1.0], [0.0, 0.0]])
    assert lo <= abs(np.linalg.det(x)) <= hi
    assert classify_orbit(x).near_degenerate
    assert not classify_orbit(H).near_degenerate


@given(seeds)
def test_classification_is_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    a = random_algebra("sl2R", 2, rng)
    if abs(np.linalg.det(a)) < 1e-6:
        return
    g = _random_sl2_group(rng, 0.7)
    c1, c2 = classify_orbit(a), classify_orbit(g @ a @ np.linalg.inv(g))
    assert c1.kind == c2.kind
    assert c1.lam == pytest.approx(c2.lam, rel=1e-8, abs=1e-8)
    assert eigenvalue_kind(a) == c1.kind


def test_classification_against_eigenvalues_on_many_samples():
    rng = np.random.default_rng(11)
    mismatched = 0
    for _ in range(500):
        a = random_algebra("sl2R", 2, rng)
        if abs(np.linalg.det(a)) > 1e-6:
            mismatched += classify_orbit(a).kind != eigenvalue_kind(a)
    assert mismatched == 0


def test_elliptic_label_is_square_root_of_determinant():
    rng = np.random.default_rng(12)
    for _ in range(50):
        a = random_algebra("sl2R", 2, rng)
        if np.linalg.det(a) > 1e-6:
            assert abs(classify_orbit(a).lam) == pytest.approx(np.sqrt(np.linalg.det(a)))


# -- stabilisers and the orbit form ----------------------------------------------


@pytest.mark.parametrize("kind,group", [("elliptic", "SO(2)"), ("hyperbolic", "SO(1,1)"),
                                        ("parabolic_plus", "P+"), ("parabolic_minus", "P-")])
def test_stabilizers(kind, group):
    cls = classify_orbit(normal_form(kind, 1.3))
    (gen,) = stabilizer_basis(cls)
    np.testing.assert_allclose(commutator(entries(gen), normal_form(kind, 1.3)), 0.0, atol=1e-15)
    assert stabilizer_group_type(gen) == group


def test_kks_form_example():
    # kappa(h, [e+, e-]) = kappa(h, 2h) = -2
    assert kks_form(H, E_PLUS, E_MINUS) == pytest.approx(-2.0)
    assert kks_form(H, E_MINUS, E_PLUS) == pytest.approx(2.0)


def test_kks_form_degenerates_along_stabilizer():
    nu = 1.7 * H
    gens = [H, E_PLUS, E_MINUS]
    mat = kks_matrix(nu, gens)
    np.testing.assert_allclose(mat, -mat.T, atol=1e-15)
    np.testing.assert_allclose(mat[0], 0.0, atol=1e-15)
    assert abs(np.linalg.det(mat[1:, 1:])) > 1.0


@given(seeds)
def test_kks_form_is_invariant(seed):
    rng = np.random.default_rng(seed)
    nu, a, b = (random_algebra("sl2R", 2, rng) for _ in range(3))
    g = _random_sl2_group(rng, 0.5)
    ginv = np.linalg.inv(g)
    assert kks_form(g @ nu @ ginv, g @ a @ ginv, g @ b @ ginv) == pytest.approx(
        kks_form(nu, a, b), abs=1e-9 * (1 + abs(kks_form(nu, a, b))))


# -- prequantisation ---------------------------------------------------------------


def test_elliptic_prequantization_requires_integral_label():
    with pytest.raises(NotPrequantizable):
        prequantization_character(classify_orbit(0.5 * H))
    assert not is_prequantizable(classify_orbit(0.5 * H))
    assert is_prequantizable(classify_orbit(2.0 * H))
    assert is_prequantizable(classify_orbit(0.5 * E_MINUS))
    with pytest.raises(ZeroElement):
        prequantization_character(OrbitClass("zero", 0.0, None, None))


@pytest.mark.parametrize("kind,lam,count", [("elliptic", 2.0, 1), ("elliptic", -3.0, 1),
                                            ("hyperbolic", 0.6, 2), ("parabolic_plus", 0.0, 2),
                                            ("parabolic_minus", 0.0, 2)])
def test_characters_are_homomorphisms_integrating_the_label(kind, lam, count):
    nf = normal_form(kind, lam)
    chars = prequantization_character(classify_orbit(nf))
    assert len(chars) == count
    rng = np.random.default_rng(13)
    for ch in chars:
        for _ in range(10):
            g1, g2 = ch.sample_stabilizer(rng), ch.sample_stabilizer(rng)
            assert abs(ch(g1 @ g2) - ch(g1) * ch(g2)) < 1e-12
            assert abs(abs(ch(g1)) - 1) < 1e-12
        # derivative at the identity is kappa(mu, X)
        assert ch.derivative() == pytest.approx(half_trace(nf, ch.generator), abs=1e-8)


def test_hyperbolic_square_root_character_squares_to_doubled_orbit():
    rng = np.random.default_rng(14)
    lam = 0.6
    sqrt_rho = prequantization_character(classify_orbit(normal_form("hyperbolic", lam)))[1]
    rho2 = prequantization_character(classify_orbit(normal_form("hyperbolic", 2 * lam)))[0]
    for _ in range(10):
        g = sqrt_rho.sample_stabilizer(rng)
        assert abs(sqrt_rho(g) ** 2 - rho2(g)) < 1e-12


def test_orbit_table():
    rows = {r["mu"]: r for r in orbit_table()}
    assert rows["N_e"] == {"mu": "N_e", "type": "elliptic", "stabilizer": "SO(2)",
                           "quantizable": "lambda in Z", "characters": ["rho"]}
    assert rows["N_h"]["stabilizer"] == "SO(1,1)" and rows["N_h"]["quantizable"] == "always"
    assert rows["N_h"]["characters"] == ["rho", "sqrt_rho"]
    assert rows["N_p"]["type"] == "parabolic" and rows["N_p"]["stabilizer"] == "P±"
    assert rows["N_p"]["characters"] == ["trivial", "sign"]


# -- pushed orbit form on unimodular positive matrices --------------------------


@given(seeds)
def test_pushed_form_matches_orbit_form(seed):
    rng = np.random.default_rng(seed)
    lam = 1.7
    g = _random_sl2_group(rng, 0.8)
    b = orbit_to_positive(g)
    nu = g @ (lam * H) @ np.linalg.inv(g)
    a1, a2 = random_algebra("sl2R", 2, rng), random_algebra("sl2R", 2, rng)
    c1, c2 = a1 @ b + b @ a1.T, a2 @ b + b @ a2.T
    val = pushed_orbit_form(b, c1, c2, lam)
    expected = half_trace(nu, commutator(a1, a2))
    assert val == pytest.approx(expected, abs=1e-9 * (1 + abs(expected)))
    assert pushed_orbit_form(b, c2, c1, lam) == pytest.approx(-val, abs=1e-9 * (1 + abs(val)))


def test_pushed_form_fibre_is_rotation_invariant():
    # g and g r (r in SO(2)) give the same B
    rng = np.random.default_rng(15)
    g = _random_sl2_group(rng)
    r = scipy.linalg.expm(0.8 * H)
    np.testing.assert_allclose(orbit_to_positive(g), orbit_to_positive(g @ r), atol=1e-12)


def test_pushed_form_input_validation():
    c = np.diag([1.0, -1.0])
    with pytest.raises(NotPositiveDefinite):
        pushed_orbit_form(-np.eye(2), c, c, 1.0)
    with pytest.raises(NotPositiveDefinite):
        pushed_orbit_form(np.array([[1.0, 2.0], [0.0, 1.0]]), c, c, 1.0)
    with pytest.raises(ConstraintViolation):
        pushed_orbit_form(2 * np.eye(2), c, c, 1.0)
    with pytest.raises(ConstraintViolation):
        pushed_orbit_form(np.eye(2), np.eye(2), c, 1.0)


# -- orbit systems --------------------------------------------------------------------


def test_orbit_system_momentum_is_minus_point():
    ex = orbit_system("elliptic", 1.3)
    s = ex.sample
    nu = -s.momentum(s.point)
    assert classify_orbit(nu).kind == "elliptic"
    assert classify_orbit(nu).lam == pytest.approx(1.3)


# -- the Sp / O dual pair -----------------------------------------------------------


@given(seeds)
def test_dual_pair_momenta_are_mutually_invariant(seed):
    rng = np.random.default_rng(seed)
    n = 2
    x = rng.normal(size=(2 * n, 2 * n))
    jm = standard_symplectic(n)
    s = scipy.linalg.expm(jm @ (lambda m: m + m.T)(0.3 * rng.normal(size=(2 * n, 2 * n))))
    q = scipy.linalg.expm((lambda m: m - m.T)(rng.normal(size=(2 * n, 2 * n))))
    np.testing.assert_allclose(s.T @ jm @ s, jm, atol=1e-10)
    # J_O is invariant under the left Sp action, J_Sp under the right O action
    np.testing.assert_allclose(j_o(s @ x), j_o(x), atol=1e-8 * np.linalg.norm(x) ** 2)
    np.testing.assert_allclose(j_sp(x @ q), j_sp(x), atol=1e-8 * np.linalg.norm(x) ** 2)
    sample = matrix_dual_pair(x)
    np.testing.assert_allclose(entries(sample.J_sp), -x @ x.T @ jm)
    np.testing.assert_allclose(entries(sample.J_o), x.T @ jm @ x)


def test_unitary_symplectic_is_both():
    u = random_unitary_symplectic(2, np.random.default_rng(16))
    jm = standard_symplectic(2)
    np.testing.assert_allclose(u.T @ u, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(u.T @ jm @ u, jm, atol=1e-12)


def test_siegel_reduction():
    rng = np.random.default_rng(17)
    jm = standard_symplectic(2)
    sym = 0.4 * rng.normal(size=(4, 4))
    x = scipy.linalg.expm(jm @ (sym + sym.T))
    rep = siegel_reduction_check(x, 2, rng)
    assert rep.passed
    cs = rep.complex_structure
    np.testing.assert_allclose(cs @ cs, -np.eye(4), atol=1e-10)
    with pytest.raises(NotInLevelSet):
        siegel_reduction_check(2 * x, 2, rng)
