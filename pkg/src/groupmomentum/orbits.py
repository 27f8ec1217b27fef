"""Coadjoint orbits of SL(2, R) and the Sp/O matrix dual pair.

sl(2, R) is identified with its dual through ``kappa(A, B) = tr(AB)/2``; the
generators ``e_+ = diag(1, -1)``, ``e_- = [[0, 1], [1, 0]]`` and
``h = [[0, 1], [-1, 0]]`` are orthonormal with signature (+, +, -).  Under
this identification the coadjoint action becomes the adjoint action and
every non-zero element is conjugate to exactly one of

* ``N_e^lam = lam h`` (elliptic, ``lam != 0``; the sign selects the sheet),
* ``N_h^lam = lam e_-`` (hyperbolic, ``lam > 0``),
* ``N_p^+ = [[0, 1], [0, 0]]`` or ``N_p^- = [[0, 0], [1, 0]]`` (parabolic).

The module classifies elements, returns stabilisers, evaluates the orbit
symplectic form and its push-forward to unimodular positive matrices,
describes the prequantisation characters of the stabilisers and builds
chart-level symplectic systems for each orbit type.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import scipy.linalg

from .errors import (
    ConstraintViolation,
    NotInLevelSet,
    NotPositiveDefinite,
    NotPrequantizable,
    ZeroElement,
)
from .lie_core import (
    DualPairing,
    MatrixAlgebraElement,
    MatrixGroupElement,
    MatrixGroupModel,
    VectorGroupModel,
    commutator,
    entries,
    sl2_generators,
    sl2_pairing,
    standard_symplectic,
)
from .momentum import SymplecticSample
from .systems import ExampleSystem, j_o, j_sp

E_PLUS, E_MINUS, H = sl2_generators()
N_P_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])
N_P_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]])

KINDS = ("elliptic", "hyperbolic", "parabolic_plus", "parabolic_minus", "zero")
NEAR_DEGENERATE_BAND = (1e-10, 1e-6)


def normal_form(kind: str, lam: float = 1.0) -> np.ndarray:
    """The normal-form matrix of an orbit type."""
    if kind == "elliptic":
        return lam * H
    if kind == "hyperbolic":
        return lam * E_MINUS
    if kind == "parabolic_plus":
        return N_P_PLUS.copy()
    if kind == "parabolic_minus":
        return N_P_MINUS.copy()
    if kind == "zero":
        return np.zeros((2, 2))
    raise ValueError(f"unknown orbit kind {kind!r}")


@dataclass(frozen=True)
class OrbitClass:
    """Result of classifying an sl(2, R) element.

    Attributes:
        kind: One of :data:`KINDS`.
        lam: Orbit label (0 for parabolic orbits).
        normal_form: The normal form as a typed algebra element.
        conjugator: ``g`` with ``Ad_g(input) = normal_form``.
        near_degenerate: ``True`` when ``|det|`` lies in the warning band.
        conjugation_residual: ``|Ad_g(input) - normal_form|``.
    """

    kind: str
    lam: float
    normal_form: MatrixAlgebraElement
    conjugator: MatrixGroupElement
    near_degenerate: bool = False
    conjugation_residual: float = 0.0


def _unit_det(p: np.ndarray) -> np.ndarray:
    d = np.linalg.det(p)
    if d <= 0:
        raise ConstraintViolation("conjugating frame has non-positive determinant")
    return p / math.sqrt(d)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-14:
            return v if x > 0 else -v
    return v


def classify_orbit(a: Any, tol: float = 1e-10) -> OrbitClass:
    """Classify a traceless ``2 x 2`` real matrix by its coadjoint orbit.

    Raises:
        ZeroElement: if ``|A| < tol``.
        ConstraintViolation: if ``A`` is not in sl(2, R).
    """
    x = np.asarray(entries(a), dtype=float)
    MatrixAlgebraElement(x, "sl2R", 1e-10)
    if np.linalg.norm(x) < tol:
        raise ZeroElement("the zero element has no normal form")
    (p, b), (c, _) = x
    det = float(np.linalg.det(x))
    near = NEAR_DEGENERATE_BAND[0] <= abs(det) <= NEAR_DEGENERATE_BAND[1]
    q = np.array([[c, -p], [-p, -b]])
    if det > tol:
        lam = math.copysign(math.sqrt(det), b - c)
        frame = np.column_stack([[1.0, 0.0], -(x @ [1.0, 0.0]) / lam])
        kind = "elliptic"
    elif det < -tol:
        lam = math.sqrt(-det)
        w, v = np.linalg.eigh(q)
        v1 = _canonical_sign(v[:, -1])
        frame = np.column_stack([v1, x @ v1 / lam])
        kind = "hyperbolic"
    else:
        lam = 0.0
        w, v = np.linalg.eigh(q)
        if b - c > 0:
            p2 = _canonical_sign(v[:, 0]) / math.sqrt(abs(w[0]))
            frame = np.column_stack([x @ p2, p2])
            kind = "parabolic_plus"
        else:
            p1 = _canonical_sign(v[:, -1]) / math.sqrt(abs(w[-1]))
            frame = np.column_stack([p1, x @ p1])
            kind = "parabolic_minus"
    frame = _unit_det(frame)
    g = np.linalg.inv(frame)
    nf = normal_form(kind, lam)
    resid = float(np.linalg.norm(g @ x @ frame - nf))
    return OrbitClass(kind, lam, MatrixAlgebraElement(nf, "sl2R"),
                      MatrixGroupElement(g, "sl2R", 1e-8), near, resid)


def eigenvalue_kind(a: Any, tol: float = 1e-10) -> str:
    """Independent classification from the eigenvalues of ``A``.

    Purely imaginary pair: elliptic; real non-zero pair: hyperbolic;
    vanishing pair: parabolic (sign from the orientation ``b - c``).
    """
    x = np.asarray(entries(a), dtype=float)
    ev = np.linalg.eigvals(x)
    scale = max(1.0, float(np.linalg.norm(x)))
    if np.max(np.abs(ev)) ** 2 <= tol * scale:
        return "parabolic_plus" if x[0, 1] - x[1, 0] > 0 else "parabolic_minus"
    if np.max(np.abs(ev.imag)) > np.max(np.abs(ev.real)):
        return "elliptic"
    return "hyperbolic"


def stabilizer_basis(cls: OrbitClass) -> list[MatrixAlgebraElement]:
    """Basis of the stabiliser algebra of the normal form."""
    gen = {
        "elliptic": H,
        "hyperbolic": E_MINUS,
        "parabolic_plus": N_P_PLUS,
        "parabolic_minus": N_P_MINUS,
    }.get(cls.kind)
    if gen is None:
        return [MatrixAlgebraElement(b, "sl2R") for b in sl2_generators()]
    return [MatrixAlgebraElement(gen, "sl2R")]


def stabilizer_group_type(generator: Any) -> str:
    """Name the one-parameter stabiliser group from the square of its generator."""
    x = np.asarray(entries(generator), dtype=float)
    sq = x @ x
    s = sq[0, 0]
    if np.allclose(sq, 0.0, atol=1e-12):
        return "P+" if x[0, 1] != 0 else "P-"
    if np.allclose(sq, s * np.eye(2), atol=1e-12):
        return "SO(2)" if s < 0 else "SO(1,1)"
    return "unknown"


def kks_form(nu: Any, a: Any, b: Any, pairing: DualPairing | None = None) -> float:
    """The orbit symplectic form ``kappa(nu, [A, B])`` on generator pairs."""
    pairing = pairing or sl2_pairing()
    return pairing(commutator(entries(a), entries(b)), entries(nu))


def kks_matrix(nu: Any, generators: list, pairing: DualPairing | None = None) -> np.ndarray:
    return np.array([[kks_form(nu, a, b, pairing) for b in generators] for a in generators])


# ---------------------------------------------------------------------------
# Prequantisation characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrequantizationCharacter:
    """A character ``S -> U(1)`` of the stabiliser of a normal form.

    Attributes:
        name: Descriptor, e.g. ``"rho"``, ``"sqrt_rho"``, ``"trivial"``, ``"sign"``.
        kind: Orbit kind.
        lam: Orbit label.
        generator: Stabiliser algebra generator (unit normalised).
        evaluate: ``g -> complex``, for ``g`` in the stabiliser.
    """

    name: str
    kind: str
    lam: float
    generator: np.ndarray
    evaluate: Callable[[np.ndarray], complex]

    def __call__(self, g: Any) -> complex:
        return complex(self.evaluate(np.asarray(entries(g), dtype=float)))

    def derivative(self, a: float = 1.0, step: float = 1e-6) -> float:
        """``rho_check(a X) = -i d/dt rho(exp(t a X))`` at ``t = 0``."""
        plus = self(scipy.linalg.expm(step * a * self.generator))
        minus = self(scipy.linalg.expm(-step * a * self.generator))
        return float(((plus - minus) / (2j * step)).real)

    def sample_stabilizer(self, rng: np.random.Generator, scale: float = 2.0) -> np.ndarray:
        """Random element of the full stabiliser (both components where present)."""
        t = rng.uniform(-scale, scale)
        g = scipy.linalg.expm(t * self.generator)
        if self.kind != "elliptic" and rng.random() < 0.5:
            g = -g
        return g


def _elliptic_angle(g: np.ndarray) -> float:
    return math.atan2(g[0, 1], g[0, 0])


def _hyperbolic_parameter(g: np.ndarray) -> tuple[float, float]:
    s = 1.0 if g[0, 0] > 0 else -1.0
    return s, math.asinh(s * g[0, 1])


def prequantization_character(cls: OrbitClass, tol: float = 1e-9
                              ) -> list[PrequantizationCharacter]:
    """Characters of the stabiliser integrating ``i kappa(mu, .)``.

    Elliptic orbits have one character, defined only for integral ``lam``;
    hyperbolic orbits carry ``rho`` and a non-canonical square root of the
    character of the doubled orbit; parabolic orbits carry the trivial and
    the sign character.

    Raises:
        NotPrequantizable: for elliptic orbits with non-integral label.
    """
    lam = cls.lam
    if cls.kind == "elliptic":
        if abs(lam - round(lam)) > tol:
            raise NotPrequantizable(f"lambda = {lam} is not an integer")
        n = int(round(lam))
        return [PrequantizationCharacter(
            "rho", cls.kind, lam, H.copy(),
            lambda g: cmath.exp(-1j * n * _elliptic_angle(g)))]
    if cls.kind == "hyperbolic":
        def rho(g):
            _, u = _hyperbolic_parameter(g)
            return cmath.exp(1j * u * lam)

        def sqrt_rho(g):
            s, u = _hyperbolic_parameter(g)
            return s * cmath.exp(1j * u * lam)

        return [PrequantizationCharacter("rho", cls.kind, lam, E_MINUS.copy(), rho),
                PrequantizationCharacter("sqrt_rho", cls.kind, lam, E_MINUS.copy(), sqrt_rho)]
    if cls.kind in ("parabolic_plus", "parabolic_minus"):
        gen = N_P_PLUS if cls.kind == "parabolic_plus" else N_P_MINUS
        return [PrequantizationCharacter("trivial", cls.kind, 0.0, gen.copy(), lambda g: 1.0 + 0j),
                PrequantizationCharacter("sign", cls.kind, 0.0, gen.copy(),
                                         lambda g: complex(1.0 if g[0, 0] > 0 else -1.0))]
    raise ZeroElement("the zero orbit has no stabiliser character")


def is_prequantizable(cls: OrbitClass) -> bool:
    try:
        prequantization_character(cls)
    except NotPrequantizable:
        return False
    return True


# ---------------------------------------------------------------------------
# Push-forward to unimodular positive matrices
# ---------------------------------------------------------------------------


def _check_unimodular_spd(b: np.ndarray) -> None:
    if b.shape != (2, 2) or np.max(np.abs(b - b.T)) > 1e-12 * max(1.0, np.max(np.abs(b))):
        raise NotPositiveDefinite("B must be a symmetric 2 x 2 matrix")
    if np.min(np.linalg.eigvalsh(b)) <= 0:
        raise NotPositiveDefinite("B is not positive definite")
    if abs(np.linalg.det(b) - 1.0) > 1e-10:
        raise ConstraintViolation(f"det B = {np.linalg.det(b)} differs from 1")


def pushed_orbit_form(b: Any, c1: Any, c2: Any, lam: float) -> float:
    """``-tr(B^-1 C1 B^-1 N B^-1 C2) / 4`` with ``N = lam h``.

    ``C1, C2`` are tangent vectors at ``B`` to the unimodular positive
    matrices, i.e. symmetric with ``tr(B^-1 C) = 0`` (traceless at ``B = I``).

    Raises:
        NotPositiveDefinite: if ``B`` is not symmetric positive definite.
        ConstraintViolation: if ``det B != 1`` or ``C_i`` is not tangent.
    """
    b = np.asarray(b, dtype=float)
    _check_unimodular_spd(b)
    b_inv = np.linalg.inv(b)
    for c in (c1, c2):
        c = np.asarray(c, dtype=float)
        if np.max(np.abs(c - c.T)) > 1e-12 * max(1.0, np.max(np.abs(c))):
            raise ConstraintViolation("tangent vectors must be symmetric")
        if abs(np.trace(b_inv @ c)) > 1e-10 * max(1.0, np.linalg.norm(c)):
            raise ConstraintViolation("C is not tangent: tr(B^-1 C) != 0")
    c1, c2 = np.asarray(c1, dtype=float), np.asarray(c2, dtype=float)
    return float(-0.25 * np.trace(b_inv @ c1 @ b_inv @ (lam * H) @ b_inv @ c2))


def orbit_to_positive(g: Any) -> np.ndarray:
    """The map ``Ad_g N_e -> g g^T``."""
    g = np.asarray(entries(g), dtype=float)
    return g @ g.T


# ---------------------------------------------------------------------------
# Orbit systems
# ---------------------------------------------------------------------------


def _complement(nu0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    basis = list(sl2_generators())
    images = [commutator(x, nu0).reshape(-1) for x in basis]
    for i in range(3):
        for j in range(i + 1, 3):
            if np.linalg.matrix_rank(np.column_stack([images[i], images[j]]), tol=1e-9) == 2:
                return basis[i], basis[j]
    raise ZeroElement("orbit is a point")


@dataclass(frozen=True)
class OrbitChart:
    """``s -> Ad_{exp(s1 E1)} Ad_{exp(s2 E2)} nu0`` around the normal form."""

    nu0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    def frame(self, s: np.ndarray) -> np.ndarray:
        return scipy.linalg.expm(s[0] * self.e1) @ scipy.linalg.expm(s[1] * self.e2)

    def point(self, s: Any) -> np.ndarray:
        g = self.frame(np.asarray(s, dtype=float))
        return g @ self.nu0 @ np.linalg.inv(g)

    def generators(self, s: Any) -> tuple[np.ndarray, np.ndarray]:
        """Algebra elements ``A_i`` with ``d nu / d s_i = [A_i, nu]``."""
        s = np.asarray(s, dtype=float)
        g1 = scipy.linalg.expm(s[0] * self.e1)
        return self.e1, g1 @ self.e2 @ np.linalg.inv(g1)

    def tangent(self, s: Any) -> np.ndarray:
        nu = self.point(s)
        a1, a2 = self.generators(s)
        return np.column_stack([commutator(a1, nu).reshape(-1), commutator(a2, nu).reshape(-1)])

    def to_chart_vector(self, s: Any, ambient: np.ndarray) -> np.ndarray:
        sol, *_ = np.linalg.lstsq(self.tangent(s), np.asarray(ambient).reshape(-1), rcond=None)
        return sol

    def inverse(self, nu: np.ndarray, guess: Any, tol: float = 1e-13, max_iter: int = 50) -> np.ndarray:
        s = np.asarray(guess, dtype=float).copy()
        for _ in range(max_iter):
            r = (nu - self.point(s)).reshape(-1)
            step, *_ = np.linalg.lstsq(self.tangent(s), r, rcond=None)
            s = s + step
            if np.max(np.abs(step)) < tol:
                break
        return s


def orbit_system(kind: str, lam: float = 1.0, point: Any = (0.1, -0.2)) -> ExampleSystem:
    """Chart-level symplectic system on the coadjoint orbit through a normal form.

    ``SL(2, R)`` acts by ``nu -> g nu g^{-1}``; the symplectic form is
    ``omega(d_i nu, d_j nu) = kappa(nu, [A_i, A_j])`` and the momentum map
    with respect to ``tr(AB)/2`` is ``J(nu) = -nu``.
    """
    nu0 = normal_form(kind, lam)
    chart = OrbitChart(nu0, *_complement(nu0))
    pairing = sl2_pairing()

    def omega(s):
        nu = chart.point(s)
        a1, a2 = chart.generators(s)
        w = kks_form(nu, a1, a2, pairing)
        return np.array([[0.0, w], [-w, 0.0]])

    def action(g, s):
        g = np.asarray(entries(g), dtype=float)
        return chart.inverse(g @ chart.point(s) @ np.linalg.inv(g), s)

    def inf_action(a, s):
        return chart.to_chart_vector(s, commutator(entries(a), chart.point(s)))

    sample = SymplecticSample(
        point=np.asarray(point, dtype=float),
        omega=omega,
        action=action,
        inf_action=inf_action,
        momentum=lambda s: -chart.point(s),
        group=MatrixGroupModel(2, "sl2R"),
        dual_group=VectorGroupModel((2, 2)),
        name=f"orbit-{kind}",
    )
    return ExampleSystem(sample, pairing, pairing.basis_left)


def kks_structure_pi(mu: Any, a: Any) -> np.ndarray:
    """``pi(mu, A) = coad_A mu = [mu, A]`` for the trace pairing on sl(2, R)."""
    return commutator(entries(mu), entries(a))


# ---------------------------------------------------------------------------
# Orbit table
# ---------------------------------------------------------------------------


def orbit_table(labels: tuple[float, ...] = (-2.0, -1.0, 0.5, 1.0, 1.5, 2.0, 3.0)) -> list[dict]:
    """Regenerate the overview of the coadjoint orbits from computations.

    Every column is derived: the type by :func:`classify_orbit`, the stabiliser
    group from the square of the stabiliser generator, quantisability by
    scanning orbit labels, and the character list from
    :func:`prequantization_character`.
    """
    rows = []
    for mu_name, kind in (("N_e", "elliptic"), ("N_h", "hyperbolic"), ("N_p", "parabolic_plus")):
        sample = normal_form(kind, 1.0)
        cls = classify_orbit(sample)
        stab = stabilizer_basis(cls)[0]
        group = stabilizer_group_type(stab)
        if group in ("P+", "P-"):
            group = "P±"
        quantizable_at = []
        for lam in labels:
            c = classify_orbit(normal_form(kind, lam)) if kind != "parabolic_plus" else cls
            quantizable_at.append(is_prequantizable(c))
        if all(quantizable_at):
            quant = "always"
        else:
            integral = [abs(lam - round(lam)) < 1e-9 for lam in labels]
            quant = "lambda in Z" if quantizable_at == integral else "partial"
        chars = [c.name for c in prequantization_character(cls)]
        rows.append({"mu": mu_name, "type": cls.kind.split("_")[0], "stabilizer": group,
                     "quantizable": quant, "characters": chars})
    return rows


# ---------------------------------------------------------------------------
# Sp / O dual pair and the Siegel space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixDualPairSample:
    """Momentum values of the commuting Sp and O actions at a matrix ``X``."""

    X: np.ndarray
    J_sp: MatrixAlgebraElement
    J_o: MatrixAlgebraElement
    standard_J: np.ndarray = field(repr=False)


def matrix_dual_pair(x: Any) -> MatrixDualPairSample:
    """``J_Sp(X) = -X X^T J`` and ``J_O(X) = X^T J X`` on ``M(2n x 2n, R)``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0] // 2
    return MatrixDualPairSample(x, MatrixAlgebraElement(j_sp(x), "sp2nR", 1e-10),
                                MatrixAlgebraElement(j_o(x), "o_n", 1e-10),
                                standard_symplectic(n))


def random_unitary_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Element of ``U(n) = Sp(2n) intersected with O(2n)``: ``exp([[a, -b], [b, a]])``."""
    a = rng.normal(size=(n, n))
    a = a - a.T
    b = rng.normal(size=(n, n))
    b = b + b.T
    return scipy.linalg.expm(np.block([[a, -b], [b, a]]))


@dataclass(frozen=True)
class SiegelReport:
    level_set_residual: float
    stabilizer_residual: float
    square_residual: float
    metric_symmetry_residual: float
    metric_min_eigenvalue: float
    complex_structure_invariance: float
    complex_structure: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        tol = 1e-10
        return (self.stabilizer_residual < tol and self.square_residual < tol
                and self.metric_symmetry_residual < tol and self.metric_min_eigenvalue > 0
                and self.complex_structure_invariance < tol)


def siegel_reduction_check(x: Any, n: int, rng: np.random.Generator | None = None,
                           samples: int = 5) -> SiegelReport:
    """Check the U(n)-reduction data at a point of ``J_O^{-1}(J)``.

    With ``omega0(u, v) = u^T J v`` the induced complex structure
    ``I = X J X^{-1}`` squares to ``-1`` and ``omega0(I u, v)`` is the positive
    definite metric ``(X X^T)^{-1}``.

    Raises:
        NotInLevelSet: if ``X^T J X != J``.
    """
    rng = rng or np.random.default_rng(0)
    x = np.asarray(x, dtype=float)
    jm = standard_symplectic(n)
    scale = max(1.0, float(np.linalg.norm(x)) ** 2)
    level = float(np.linalg.norm(j_o(x) - jm))
    if level > 1e-10 * scale:
        raise NotInLevelSet(f"X^T J X differs from J by {level:.3e}")
    cs = x @ jm @ np.linalg.inv(x)
    metric = (cs.T @ jm)
    stab = 0.0
    inv = 0.0
    for _ in range(samples):
        u = random_unitary_symplectic(n, rng)
        stab = max(stab, float(np.linalg.norm(j_o(x @ u) - j_o(x))) / scale)
        xu = x @ u
        inv = max(inv, float(np.linalg.norm(xu @ jm @ np.linalg.inv(xu) - cs)) / scale)
    return SiegelReport(
        level_set_residual=level,
        stabilizer_residual=stab,
        square_residual=float(np.linalg.norm(cs @ cs + np.eye(2 * n))) / scale,
        metric_symmetry_residual=float(np.linalg.norm(metric - metric.T)) / scale,
        metric_min_eigenvalue=float(np.min(np.linalg.eigvalsh(0.5 * (metric + metric.T)))),
        complex_structure_invariance=inv,
        complex_structure=cs,
    )
