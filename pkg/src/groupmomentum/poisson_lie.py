"""Poisson-Lie structures, coconjugation matched pairs and dressing actions.

A dual pair of Lie groups ``kappa(G, H)`` is represented by a
:class:`~groupmomentum.lie_core.DualPairing` whose left side is the Lie
algebra of ``G`` and whose right side is the Lie algebra of ``H``; the group
models attached to the pairing supply exponentials, adjoint actions and
brackets on each side (abelian sides use vector-group models).

A Poisson-Lie structure on ``H`` compatible with the bracket on ``g`` is a
map ``pi(eta, A)`` with values in ``h``.  Multilinear maps on ``g`` are
stored as arrays of shape ``(n,) * k + (m,)``: the entry at an index tuple is
the value on those basis elements, written in the coordinates of the right
basis (``m`` coordinates; 1 for scalar-valued maps).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    CocycleLawViolated,
    ConstraintViolation,
    DegreeOverflow,
    SingularInput,
    SkewSymmetryViolated,
)
from .lie_core import (
    DualPairing,
    MatrixGroupModel,
    VectorGroupModel,
    coadjoint,
    entries,
    im_trace,
    infinitesimal_coadjoint,
    iwasawa_pairing,
    sl2_pairing,
)

MAX_CE_DEGREE = 3


# ---------------------------------------------------------------------------
# Residual reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    """A flat ``name -> residual`` map with a pass/fail helper."""

    values: dict

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    @property
    def worst(self) -> float:
        return max(self.values.values()) if self.values else 0.0

    def passed(self, tol: float) -> bool:
        return self.worst < tol

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in self.values.items()}


# ---------------------------------------------------------------------------
# Structure constants on a pairing
# ---------------------------------------------------------------------------


def _model(group: Any, sample: np.ndarray) -> Any:
    return group if group is not None else MatrixGroupModel(sample.shape[0])


@dataclass(frozen=True)
class PairingAlgebra:
    """Basis data of a dual pair of Lie algebras.

    Attributes:
        pairing: The pairing ``kappa(g, h)``.
        g_struct: ``[e_a, e_b] = g_struct[a, b, c] e_c``.
        h_struct: ``[f_r, f_s] = h_struct[r, s, t] f_t``.
        coad_g: ``coad_g[a]`` is the matrix of ``mu -> coad_{e_a} mu`` on h.
        coad_h: ``coad_h[r]`` is the matrix of ``A -> coad_{f_r} A`` on g.
    """

    pairing: DualPairing
    g_struct: np.ndarray = field(init=False, repr=False)
    h_struct: np.ndarray = field(init=False, repr=False)
    coad_g: np.ndarray = field(init=False, repr=False)
    coad_h: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        p = self.pairing
        left, right = p.basis_left, p.basis_right
        gm = _model(p.left_group, left[0])
        hm = _model(p.right_group, right[0])
        n = len(left)
        gram = p.gram
        g_struct = np.array([[p.left_coords(gm.bracket(a, b)) for b in left] for a in left])
        h_struct = np.array([[p.right_coords(hm.bracket(r, s)) for s in right] for r in right])
        # kappa(e_b, coad_{e_a} f_s) = kappa([e_a, e_b], f_s)
        coad_g = np.array([np.linalg.solve(gram, g_struct[a] @ gram) for a in range(n)])
        # kappa(coad_{f_r} e_b, f_s) = kappa(e_b, [f_r, f_s])
        coad_h = np.array([np.linalg.solve(gram.T, h_struct[r] @ gram.T) for r in range(n)])
        object.__setattr__(self, "g_struct", g_struct)
        object.__setattr__(self, "h_struct", h_struct)
        object.__setattr__(self, "coad_g", coad_g)
        object.__setattr__(self, "coad_h", coad_h)

    @property
    def dim(self) -> int:
        return self.pairing.dim


def kks_pairing() -> DualPairing:
    """``tr(AB)/2`` between sl(2, R) and its dual viewed as an abelian group."""
    return replace(sl2_pairing(), right_group=VectorGroupModel((2, 2)), name="sl2-dual-abelian")


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg differential and the bracket of linear maps
# ---------------------------------------------------------------------------


def ce_differential(lam: Any, degree: int, pairing: DualPairing | PairingAlgebra,
                    module: str | Sequence[np.ndarray] = "minus_coadjoint") -> np.ndarray:
    """Chevalley-Eilenberg differential of an alternating ``k``-linear map.

    ``d lam(A_1..A_{k+1}) = sum_i (-1)^(i+1) A_i . lam(..^i..)
    + sum_{i<j} (-1)^(i+j) lam([A_i, A_j], ..^i..^j..)``.

    Args:
        lam: Array of shape ``(n,) * degree + (m,)``.
        degree: ``k`` (0 to 3).
        pairing: Pairing or precomputed :class:`PairingAlgebra`.
        module: ``"minus_coadjoint"`` (``A . mu = -coad_A mu`` on h, the
            module making the signs read ``(-1)^i coad_{A_i}``), ``"trivial"``,
            or a sequence of ``m x m`` representation matrices.

    Raises:
        DegreeOverflow: if ``degree`` is outside ``0..3``.
    """
    if not 0 <= degree <= MAX_CE_DEGREE:
        raise DegreeOverflow(f"degree {degree} outside 0..{MAX_CE_DEGREE}")
    alg = pairing if isinstance(pairing, PairingAlgebra) else PairingAlgebra(pairing)
    n = alg.dim
    lam = np.asarray(lam, dtype=float)
    if lam.shape[:degree] != (n,) * degree or lam.ndim != degree + 1:
        raise DegreeOverflow(f"array of shape {lam.shape} is not a degree-{degree} map")
    m = lam.shape[-1]
    if isinstance(module, str):
        if module == "minus_coadjoint":
            rep = -alg.coad_g
        elif module == "trivial":
            rep = np.zeros((n, m, m))
        else:
            raise ValueError(f"unknown module {module!r}")
    else:
        rep = np.asarray(module, dtype=float)
    out = np.zeros((n,) * (degree + 1) + (m,))
    for idx in itertools.product(range(n), repeat=degree + 1):
        val = np.zeros(m)
        for p in range(degree + 1):
            rest = idx[:p] + idx[p + 1:]
            val += (-1) ** p * (rep[idx[p]] @ lam[rest])
        for p in range(degree + 1):
            for q in range(p + 1, degree + 1):
                rest = tuple(idx[r] for r in range(degree + 1) if r not in (p, q))
                coeff = alg.g_struct[idx[p], idx[q]]
                val += (-1) ** (p + q) * np.tensordot(coeff, lam[(slice(None),) + rest], axes=1)
        out[idx] = val
    return out


def _apply(phi: np.ndarray, coords: np.ndarray) -> np.ndarray:
    return coords @ phi


def map_bracket(phi: Any, psi: Any, pairing: DualPairing | PairingAlgebra) -> np.ndarray:
    """Bracket ``[phi, psi]`` of two linear maps ``g -> h``.

    ``[phi, psi](A, B) = T(A, B) - T(B, A)`` with
    ``T(A, B) = psi(coad_{phi(A)} B) - phi(coad_{psi(B)} A) + [phi(A), psi(B)]``,
    so that for ``phi = psi``
    ``[phi, phi](A, B) / 2 = phi(coad_{phi(A)} B) - phi(coad_{phi(B)} A) + [phi(A), phi(B)]``.
    Here ``coad_mu A`` (``mu`` in h) is defined by ``kappa(coad_mu A, nu) = kappa(A, [mu, nu])``.

    Args:
        phi, psi: Arrays of shape ``(n, m)``; row ``a`` holds the right
            coordinates of the image of the ``a``-th left basis element.

    Returns:
        Array of shape ``(n, n, m)``.
    """
    alg = pairing if isinstance(pairing, PairingAlgebra) else PairingAlgebra(pairing)
    phi, psi = np.asarray(phi, dtype=float), np.asarray(psi, dtype=float)
    n = alg.dim
    eye = np.eye(n)

    def coad_h(mu, a_coords):
        return np.tensordot(mu, alg.coad_h, axes=1) @ a_coords

    def bracket_h(x, y):
        return np.einsum("r,s,rst->t", x, y, alg.h_struct)

    def t(a, b):
        return (_apply(psi, coad_h(phi[a], eye[b])) - _apply(phi, coad_h(psi[b], eye[a]))
                + bracket_h(phi[a], psi[b]))

    out = np.zeros((n, n, phi.shape[1]))
    for a in range(n):
        for b in range(n):
            out[a, b] = t(a, b) - t(b, a)
    return out


def map_bracket_index_oracle(phi: Any, pairing: DualPairing | PairingAlgebra) -> np.ndarray:
    """``[phi, phi] / 2`` by direct structure-constant expansion (oracle)."""
    alg = pairing if isinstance(pairing, PairingAlgebra) else PairingAlgebra(pairing)
    phi = np.asarray(phi, dtype=float)
    ch, hs = alg.coad_h, alg.h_struct
    # phi(coad_{phi(A)} B) = sum_r phi[a, r] coad_h[r][c, b] phi[c]
    t1 = np.einsum("ar,rcb,cm->abm", phi, ch, phi)
    t2 = np.einsum("br,rca,cm->abm", phi, ch, phi)
    t3 = np.einsum("ar,bs,rsm->abm", phi, phi, hs)
    return t1 - t2 + t3


def bivector_from_map(phi: np.ndarray, pairing: DualPairing | PairingAlgebra) -> np.ndarray:
    """``Lambda(A, B) = kappa(B, phi(A))`` on basis pairs."""
    alg = pairing if isinstance(pairing, PairingAlgebra) else PairingAlgebra(pairing)
    return np.asarray(phi) @ alg.pairing.gram.T


def bivector_poisson_residual(lam: np.ndarray, pairing: DualPairing | PairingAlgebra) -> np.ndarray:
    """``d_g Lambda - [Lambda, Lambda]/2`` evaluated on basis triples.

    ``Lambda`` is a bivector on h given by ``Lambda(e_a, e_b)``; the
    differential is transferred through ``kappa`` and the Schouten bracket
    ``[Lambda, Lambda] = Lambda_kl Lambda_pq [eps^k, eps^p] ^ eps^l ^ eps^q`` (``eps`` the
    basis of h dual to the basis of g) is
    evaluated with determinant pairings.  Returns an ``(n, n, n)`` array.
    """
    alg = pairing if isinstance(pairing, PairingAlgebra) else PairingAlgebra(pairing)
    n = alg.dim
    lam = np.asarray(lam, dtype=float)
    gs = alg.g_struct
    gram = alg.pairing.gram
    # dual basis of h: eps^k = sum_s dual[k, s] f_s with kappa(e_a, eps^k) = delta_ak;
    # Lambda = 1/2 lam[k, l] eps^k ^ eps^l and f_u = sum_r gram[r, u] eps^r
    dual = np.linalg.inv(gram).T
    bracket_dual = np.einsum("ks,pt,stu,ru->kpr", dual, dual, alg.h_struct, gram)
    d_term = np.zeros((n, n, n))
    for a, b, c in itertools.product(range(n), repeat=3):
        # -Lambda([A,B],C) + Lambda([A,C],B) - Lambda([B,C],A)
        d_term[a, b, c] = (-gs[a, b] @ lam[:, c] + gs[a, c] @ lam[:, b] - gs[b, c] @ lam[:, a])
    # <e_a ^ e_b ^ e_c, x ^ y ^ z> = det, summed over components
    schouten = np.zeros((n, n, n))
    t = np.einsum("kl,pq,kpr->rlq", lam, lam, bracket_dual)  # coefficient of eps^r^eps^l^eps^q
    for a, b, c in itertools.product(range(n), repeat=3):
        idx = (a, b, c)
        val = 0.0
        for perm in itertools.permutations(range(3)):
            sign = _perm_sign(perm)
            val += sign * t[idx[perm[0]], idx[perm[1]], idx[perm[2]]]
        schouten[a, b, c] = val
    return d_term - 0.5 * schouten


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Poisson-Lie structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoissonLieStructure:
    """A map ``pi(eta, A) -> h`` on a dual pair ``kappa(G, H)``.

    Attributes:
        pi: Evaluator ``(eta, A) -> value in h``.
        pairing: ``kappa(g, h)``; its right group model is the group ``H``.
        name: Label.
    """

    pi: Callable[[Any, Any], Any]
    pairing: DualPairing
    name: str = ""

    @property
    def group(self) -> Any:
        p = self.pairing
        return _model(p.right_group, p.basis_right[0])

    def __call__(self, eta: Any, a: Any) -> np.ndarray:
        return np.asarray(entries(self.pi(eta, a)))

    def matrix(self, eta: Any) -> np.ndarray:
        """``pi(eta, .)`` as an ``(n, m)`` array in right coordinates."""
        p = self.pairing
        return np.array([p.right_coords(self(eta, a)) for a in p.basis_left])

    def skew_residual(self, eta: Any) -> float:
        lam = bivector_from_map(self.matrix(eta), self.pairing)
        return float(np.max(np.abs(lam + lam.T)))


def kks_structure() -> PoissonLieStructure:
    """``pi(mu, A) = coad_A mu`` on sl(2, R)* viewed as an abelian group."""
    pairing = kks_pairing()
    return PoissonLieStructure(lambda mu, a: infinitesimal_coadjoint(a, mu, pairing),
                               pairing, "kks-sl2")


def zero_structure(pairing: DualPairing) -> PoissonLieStructure:
    return PoissonLieStructure(lambda eta, a: np.zeros_like(pairing.basis_right[0]),
                               pairing, "zero")


def _right_coadjoint(eta: Any, a: Any, pairing: DualPairing) -> np.ndarray:
    """``Coad_eta A`` for ``eta`` in H acting on g: ``kappa(Coad_eta A, mu) = kappa(A, Ad_eta mu)``."""
    return entries(coadjoint(eta, a, pairing.swapped()))


def _random_coords(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    return rng.normal(size=(count, n))


def check_poisson_lie(structure: PoissonLieStructure, samples: Sequence[Any],
                      rng: np.random.Generator | None = None, combos: int = 20,
                      outer_step: float = 1e-4) -> ResidualReport:
    """Residuals of the four Poisson-Lie conditions (plus linearity).

    * ``skew``: ``|kappa(A, pi(eta, B)) + kappa(B, pi(eta, A))|``;
    * ``multiplicativity``: ``|pi(eta zeta, A) - Ad_{zeta^-1} pi(eta, Coad_{zeta^-1} A) - pi(zeta, A)|``
      over ordered sample pairs;
    * ``poisson``: ``|d_h pi - [pi, pi]/2|`` on basis pairs at each sample;
    * ``compatibility``: ``|d/dt pi(exp(t mu), A) - coad_A mu|`` at the identity.

    Conditions are evaluated on basis elements and on ``combos`` random
    linear combinations.
    """
    rng = rng or np.random.default_rng(0)
    p = structure.pairing
    alg = PairingAlgebra(p)
    hm = structure.group
    n = p.dim
    left = p.basis_left
    pts = [entries(s) for s in samples]
    coeffs = np.vstack([np.eye(n), _random_coords(rng, n, combos)])
    elems = [p.left_from_coords(c) for c in coeffs]

    lin = 0.0
    skew = 0.0
    poisson = 0.0
    for eta in pts:
        mat = structure.matrix(eta)
        for c in coeffs[n:]:
            direct = p.right_coords(structure(eta, p.left_from_coords(c)))
            lin = max(lin, float(np.max(np.abs(direct - c @ mat))))
        lam = bivector_from_map(mat, p)
        skew = max(skew, float(np.max(np.abs(lam + lam.T))))
        d_pi = ce_differential(mat, 1, alg)
        half = map_bracket(mat, mat, alg) / 2.0
        poisson = max(poisson, float(np.max(np.abs(d_pi - half))))

    mult = 0.0
    for eta in pts:
        for zeta in pts:
            prod = hm.mul(eta, zeta)
            zinv = hm.inv(zeta)
            for a in elems[: n + 5]:
                lhs = structure(prod, a)
                rhs = hm.ad(zinv, structure(eta, _right_coadjoint(zinv, a, p))) + structure(zeta, a)
                mult = max(mult, float(np.max(np.abs(p.right_coords(lhs - rhs)))))

    compat = 0.0
    for mu in p.basis_right:
        pts4 = [hm.exp(k * outer_step * mu) for k in (-2, -1, 1, 2)]
        for a in left:
            v = [structure(x, a) for x in pts4]
            deriv = (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * outer_step)
            target = infinitesimal_coadjoint(a, mu, p)
            compat = max(compat, float(np.max(np.abs(p.right_coords(deriv - entries(target))))))
    return ResidualReport({"linearity": lin, "skew": skew, "multiplicativity": mult,
                           "poisson": poisson, "compatibility": compat})


# ---------------------------------------------------------------------------
# Coconjugation matched pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoconjugationPair:
    """Two actions ``Upsilon: G x G* -> G*`` and ``Upsilon*: G* x G -> G``.

    Attributes:
        upsilon: ``(g, eta) -> eta'``.
        upsilon_star: ``(eta, g) -> g'``.
        group: Model of ``G``.
        dual_group: Model of ``G*``.
        name: Label.
    """

    upsilon: Callable[[Any, Any], Any]
    upsilon_star: Callable[[Any, Any], Any]
    group: Any
    dual_group: Any
    name: str = ""


def _dist(model: Any, x: Any, y: Any) -> float:
    return float(np.max(np.abs(np.asarray(entries(x)) - np.asarray(entries(y)))))


def _left_tangent(model: Any, curve: Callable[[float], Any], step: float) -> np.ndarray:
    """``x(0)^{-1} x'(0)`` (or ``x'(0)`` for abelian groups) by a fourth-order central stencil."""
    base = curve(0.0)
    diff = [model.local_difference(curve(t), base) for t in (-2 * step, -step, step, 2 * step)]
    return (diff[0] - 8 * diff[1] + 8 * diff[2] - diff[3]) / (12 * step)


def _right_tangent(model: Any, curve: Callable[[float], Any], step: float) -> np.ndarray:
    """``x'(0) x(0)^{-1}`` (or ``x'(0)`` for abelian groups)."""
    base = entries(curve(0.0))
    if getattr(model, "abelian", False):
        return _left_tangent(model, curve, step)
    pts = [entries(curve(t)) for t in (-2 * step, -step, step, 2 * step)]
    deriv = (pts[0] - 8 * pts[1] + 8 * pts[2] - pts[3]) / (12 * step)
    return deriv @ np.linalg.inv(base)


def check_matched_pair(pair: CoconjugationPair, g_samples: Sequence[Any],
                       eta_samples: Sequence[Any], pairing: DualPairing | None = None,
                       step: float = 1e-5) -> ResidualReport:
    """Residuals of the action laws, the matched-pair identities and, when a
    pairing is given, the infinitesimal coadjoint conditions.

    Matched-pair identities:
    ``Upsilon_g(eta1 eta2) = Upsilon_g(eta1) Upsilon_{Upsilon*_{eta1^-1}(g)}(eta2)`` and
    ``Upsilon*_eta(g1 g2) = Upsilon*_{Upsilon_{g2}(eta^-1)^-1}(g1) Upsilon*_eta(g2)``.
    """
    G, H = pair.group, pair.dual_group
    ups, ups_s = pair.upsilon, pair.upsilon_star
    gs = [entries(g) for g in g_samples]
    hs = [entries(h) for h in eta_samples]
    ident = 0.0
    for h in hs:
        ident = max(ident, _dist(H, ups(G.identity(), h), h))
    for g in gs:
        ident = max(ident, _dist(G, ups_s(H.identity(), g), g))
        ident = max(ident, _dist(H, ups(g, H.identity()), H.identity()))
    for h in hs:
        ident = max(ident, _dist(G, ups_s(h, G.identity()), G.identity()))

    action = 0.0
    m1 = 0.0
    m2 = 0.0
    for i, g1 in enumerate(gs):
        g2 = gs[(i + 1) % len(gs)]
        for j, h1 in enumerate(hs):
            h2 = hs[(j + 1) % len(hs)]
            action = max(action, _dist(H, ups(G.mul(g1, g2), h1), ups(g1, ups(g2, h1))))
            action = max(action, _dist(G, ups_s(H.mul(h1, h2), g1), ups_s(h1, ups_s(h2, g1))))
            lhs = ups(g1, H.mul(h1, h2))
            rhs = H.mul(ups(g1, h1), ups(ups_s(H.inv(h1), g1), h2))
            m1 = max(m1, _dist(H, lhs, rhs))
            lhs = ups_s(h1, G.mul(g1, g2))
            rhs = G.mul(ups_s(H.inv(ups(g2, H.inv(h1))), g1), ups_s(h1, g2))
            m2 = max(m2, _dist(G, lhs, rhs))
    out = {"identity": ident, "action": action, "matched_upsilon": m1, "matched_upsilon_star": m2}

    if pairing is not None:
        inf1 = 0.0
        inf2 = 0.0
        for g in gs:
            ginv = G.inv(g)
            for mu in pairing.basis_right:
                d = _left_tangent(H, lambda t: ups(g, H.exp(t * mu)), step)
                target = entries(coadjoint(ginv, mu, pairing))
                inf1 = max(inf1, float(np.max(np.abs(pairing.right_coords(d - target)))))
        for h in hs:
            hinv = H.inv(h)
            for a in pairing.basis_left:
                d = _left_tangent(G, lambda t: ups_s(h, G.exp(t * a)), step)
                target = _right_coadjoint(hinv, a, pairing)
                inf2 = max(inf2, float(np.max(np.abs(pairing.left_coords(d - target)))))
        out["infinitesimal_upsilon"] = inf1
        out["infinitesimal_upsilon_star"] = inf2
    return ResidualReport(out)


def coadjoint_pair(pairing: DualPairing) -> CoconjugationPair:
    """``Upsilon(g, mu) = Coad_{g^-1} mu`` with the trivial action of the abelian dual."""
    G = _model(pairing.left_group, pairing.basis_left[0])
    H = pairing.right_group
    return CoconjugationPair(lambda g, mu: entries(coadjoint(G.inv(g), mu, pairing)),
                             lambda mu, g: entries(g), G, H, "coadjoint")


# ---------------------------------------------------------------------------
# Iwasawa decomposition
# ---------------------------------------------------------------------------


def iwasawa_decompose(d: Any) -> tuple[np.ndarray, np.ndarray]:
    """Factor ``d = k b`` with ``k`` unitary and ``b`` upper triangular with
    positive real diagonal (QR with a phase correction).

    For ``d`` in SL(n, C) the factor ``k`` has unit determinant.

    Raises:
        SingularInput: if ``d`` is (numerically) singular.
    """
    d = np.asarray(entries(d), dtype=complex)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise SingularInput("expected a square matrix")
    if not np.linalg.cond(d) < 1e12:
        raise SingularInput("matrix is singular")
    q, r = np.linalg.qr(d)
    diag = np.diag(r)
    phase = diag / np.abs(diag)
    k = q * phase[None, :]
    b = r / phase[:, None]
    b = np.triu(b)
    b[np.diag_indices_from(b)] = np.abs(diag)
    return k, b


def gram_schmidt_iwasawa(d: Any) -> tuple[np.ndarray, np.ndarray]:
    """Reference factorisation by classical Gram-Schmidt on the columns of ``d``."""
    d = np.asarray(entries(d), dtype=complex)
    n = d.shape[0]
    k = np.zeros_like(d)
    for j in range(n):
        v = d[:, j].copy()
        for i in range(j):
            v -= (k[:, i].conj() @ d[:, j]) * k[:, i]
        k[:, j] = v / np.linalg.norm(v)
    return k, k.conj().T @ d


def pr_k(d: Any) -> np.ndarray:
    return iwasawa_decompose(d)[0]


def pr_b(d: Any) -> np.ndarray:
    return iwasawa_decompose(d)[1]


def pr_k_algebra(x: np.ndarray) -> np.ndarray:
    """Projection of sl(n, C) onto su(n) along the triangular algebra b."""
    x = np.asarray(x, dtype=complex)
    low = np.tril(x, -1)
    return low - low.conj().T + 1j * np.diag(np.diag(x).imag)


def pr_b_algebra(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=complex) - pr_k_algebra(x)


def iwasawa_pair(n: int = 2) -> CoconjugationPair:
    """``Upsilon_k(b) = pr_B(b^-1 k^-1)^-1`` and ``Upsilon*_b(k) = pr_K(b k^-1)^-1``."""
    inv = np.linalg.inv
    return CoconjugationPair(
        lambda k, b: inv(pr_b(inv(entries(b)) @ inv(entries(k)))),
        lambda b, k: inv(pr_k(entries(b) @ inv(entries(k)))),
        MatrixGroupModel(n, "su_n"),
        MatrixGroupModel(n, "b_n"),
        "iwasawa",
    )


def factorization_residual(pair: CoconjugationPair, g: Any, eta: Any) -> float:
    """``|eta g^-1 - Upsilon*_eta(g)^-1 Upsilon_g(eta^-1)^-1|``."""
    G, H = pair.group, pair.dual_group
    lhs = entries(eta) @ np.linalg.inv(entries(g))
    rhs = G.inv(pair.upsilon_star(eta, g)) @ H.inv(pair.upsilon(g, H.inv(eta)))
    return float(np.max(np.abs(lhs - rhs)))


def iwasawa_pi_b(b: Any, a: Any, pairing: DualPairing | None = None) -> np.ndarray:
    """``pi_B(b, A) = -pr_b(Ad_{b^-1} Coad_{b^-1} A)``."""
    pairing = pairing or iwasawa_pairing(entries(b).shape[0])
    b = entries(b)
    binv = np.linalg.inv(b)
    coad = _right_coadjoint(binv, a, pairing)
    return -pr_b_algebra(binv @ coad @ b)


def iwasawa_bivector(b: Any, a: Any, c: Any) -> float:
    """``Lambda_b(A, B) = Im tr(pr_b(Ad_b A) pr_k(Ad_b B))``."""
    b = entries(b)
    binv = np.linalg.inv(b)
    return im_trace(pr_b_algebra(b @ entries(a) @ binv), pr_k_algebra(b @ entries(c) @ binv))


def fit_scalar(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares ``s`` with ``y ~ s x``; returns ``(s, max |y - s x|)``."""
    x, y = np.ravel(x), np.ravel(y)
    denom = float(x @ x)
    s = float(x @ y) / denom if denom > 0 else 0.0
    return s, float(np.max(np.abs(y - s * x))) if x.size else 0.0


# ---------------------------------------------------------------------------
# Poisson structures derived from dressing actions
# ---------------------------------------------------------------------------


def derive_dressing_poisson(pair: CoconjugationPair, pairing: DualPairing,
                            samples: Sequence[Any] = (), dual_samples: Sequence[Any] = (),
                            step: float = 1e-5, skew_tol: float = 1e-6
                            ) -> tuple[PoissonLieStructure, PoissonLieStructure]:
    """Poisson-Lie structures on ``G`` and ``G*`` induced by a matched pair.

    ``pi_{G*}(eta, A) = -eta^{-1} . d/dt Upsilon(exp(t Coad_{eta^-1} A), eta)`` and
    ``pi_G(g, mu) = d/dt Upsilon*(exp(t Coad_{g^-1} mu), g^-1) . g``.

    Raises:
        SkewSymmetryViolated: if either structure fails skew-symmetry beyond
            ``skew_tol`` at the identity or at a supplied sample.
    """
    G, H = pair.group, pair.dual_group
    swapped = pairing.swapped()

    def pi_dual(eta, a):
        eta = entries(eta)
        x = _right_coadjoint(H.inv(eta), a, pairing)
        return -_left_tangent(H, lambda t: pair.upsilon(G.exp(t * x), eta), step)

    def pi_group(g, mu):
        g = entries(g)
        ginv = G.inv(g)
        nu = entries(coadjoint(ginv, mu, pairing))
        return _right_tangent(G, lambda t: pair.upsilon_star(H.exp(t * nu), ginv), step)

    on_dual = PoissonLieStructure(pi_dual, pairing, f"{pair.name}-dual")
    on_group = PoissonLieStructure(pi_group, swapped, f"{pair.name}-group")
    for struct, pts, model in ((on_dual, dual_samples, H), (on_group, samples, G)):
        for pt in [model.identity(), *pts]:
            r = struct.skew_residual(pt)
            if r > skew_tol:
                raise SkewSymmetryViolated(f"{struct.name}: skew residual {r:.3e}")
    return on_group, on_dual


# ---------------------------------------------------------------------------
# Affine structures from cocycles
# ---------------------------------------------------------------------------


def cocycle_residual(base: CoconjugationPair, c: Callable[[Any], Any],
                     samples: Sequence[Any]) -> float:
    """Max of ``|c(gh) - c(g) - Upsilon_g(c(h))|`` over sample pairs."""
    G, H = base.group, base.dual_group
    worst = 0.0
    for g in samples:
        for h in samples:
            lhs = c(G.mul(g, h))
            rhs = H.mul(c(g), base.upsilon(g, c(h)))
            worst = max(worst, float(np.max(np.abs(H.local_difference(lhs, rhs)))))
    return worst


def affine_structure_from_cocycle(base: CoconjugationPair, c: Callable[[Any], Any],
                                  pairing: DualPairing, samples: Sequence[Any],
                                  step: float = 1e-5, tol: float = 1e-10) -> PoissonLieStructure:
    """``pi~(eta, A) = -d/dt (Upsilon + c)(exp(tA), eta)`` for abelian ``G*``.

    Raises:
        CocycleLawViolated: if ``c(gh) = c(g) + Upsilon_g(c(h))`` fails beyond ``tol``.
        ConstraintViolation: if the dual group is not abelian.
    """
    G, H = base.group, base.dual_group
    if not getattr(H, "abelian", False):
        raise ConstraintViolation("affine structures need an abelian dual group")
    r = cocycle_residual(base, c, samples)
    if r > tol:
        raise CocycleLawViolated(f"cocycle residual {r:.3e}")

    def shifted(g, eta):
        return H.mul(base.upsilon(g, eta), c(g))

    def pi(eta, a):
        return -_left_tangent(H, lambda t: shifted(G.exp(t * entries(a)), entries(eta)), step)

    return PoissonLieStructure(pi, pairing, "affine")


def affine_law_residual(structure: PoissonLieStructure, etas: Sequence[Any]) -> float:
    """Max of ``|pi(zeta + eta, A) - pi(zeta, A) - pi(eta, A) + pi(0, A)|``."""
    p = structure.pairing
    H = structure.group
    zero = H.identity()
    worst = 0.0
    for z in etas:
        for e in etas:
            for a in p.basis_left:
                val = (structure(H.mul(z, e), a) - structure(z, a) - structure(e, a)
                       + structure(zero, a))
                worst = max(worst, float(np.max(np.abs(val))))
    return worst


def translation_pair(dim: int, dual_group: Any) -> CoconjugationPair:
    """Vector group acting trivially on an abelian dual (coadjoint action is trivial)."""
    return CoconjugationPair(lambda g, eta: entries(eta), lambda eta, g: entries(g),
                             VectorGroupModel(dim), dual_group, "translation")


__all__ = [
    "ResidualReport", "PairingAlgebra", "kks_pairing", "ce_differential", "map_bracket",
    "map_bracket_index_oracle", "bivector_from_map", "bivector_poisson_residual",
    "PoissonLieStructure", "kks_structure", "zero_structure", "check_poisson_lie",
    "CoconjugationPair", "check_matched_pair", "coadjoint_pair", "iwasawa_decompose",
    "gram_schmidt_iwasawa", "pr_k", "pr_b", "pr_k_algebra", "pr_b_algebra", "iwasawa_pair",
    "factorization_residual", "iwasawa_pi_b", "iwasawa_bivector", "fit_scalar",
    "derive_dressing_poisson", "cocycle_residual", "affine_structure_from_cocycle",
    "affine_law_residual", "translation_pair",
]
