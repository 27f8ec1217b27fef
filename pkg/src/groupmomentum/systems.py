"""Catalogue of example symplectic G-systems.

Each constructor returns a :class:`~groupmomentum.momentum.SymplecticSample`
(and, where useful, the pairing under which its momentum map is meant).
Coordinates on tori are covering-space coordinates with period 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .lie_core import (
    DualPairing,
    MatrixGroupModel,
    TorusGroupModel,
    VectorGroupModel,
    circle_group,
    circle_pairing,
    o_pairing,
    sp_pairing,
    standard_symplectic,
    vector_pairing,
)
from .momentum import Hamiltonian, SymplecticSample

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ExampleSystem:
    """A system, the pairing its momentum map refers to, and its algebra basis."""

    sample: SymplecticSample
    pairing: DualPairing
    basis: tuple


def _point(x: Any, dim: int) -> np.ndarray:
    return np.zeros(dim) if x is None else np.asarray(x, dtype=float).reshape(dim)


# ---------------------------------------------------------------------------
# Linear and toroidal systems
# ---------------------------------------------------------------------------


def symplectic_vector_space(point: Any = None, scale: float = 1.0) -> ExampleSystem:
    """``(R^2, dq^dp)`` with the translation action and ``J(v) = scale * omega(v, .)``.

    ``scale = 1`` is the momentum map; any other value is a deliberately
    wrong candidate.
    """
    w = standard_symplectic(1)
    sample = SymplecticSample(
        point=_point(point, 2),
        omega=w,
        action=lambda g, v: v + np.asarray(g, dtype=float),
        inf_action=lambda a, v: np.asarray(a, dtype=float),
        momentum=lambda v: scale * (v @ w),
        group=VectorGroupModel(2),
        dual_group=VectorGroupModel(2),
        name="symplectic-vector-space",
    )
    pairing = vector_pairing(2)
    return ExampleSystem(sample, pairing, pairing.basis_left)


def symplectic_torus(point: Any = None) -> ExampleSystem:
    """``R^2 / Z^2`` with ``omega = dq^dp`` and the ``V*/Lambda*``-valued momentum."""
    w = standard_symplectic(1)
    dual = TorusGroupModel(np.eye(2))
    sample = SymplecticSample(
        point=_point([0.3, 0.6] if point is None else point, 2),
        omega=w,
        action=lambda g, v: v + np.asarray(g, dtype=float),
        inf_action=lambda a, v: np.asarray(a, dtype=float),
        momentum=lambda v: dual.wrap(v @ w),
        group=VectorGroupModel(2),
        dual_group=dual,
        name="symplectic-torus",
    )
    pairing = vector_pairing(2, left_group=VectorGroupModel(2), right_group=dual)
    return ExampleSystem(sample, pairing, pairing.basis_left)


def symplectic_torus_circle(point: Any = None) -> SymplecticSample:
    """The circle ``R e_1 / Z e_1`` acting on ``R^2 / Z^2``; ``J = -q_2 mod 1``."""
    w = standard_symplectic(1)
    return SymplecticSample(
        point=_point([0.3, 0.6] if point is None else point, 2),
        omega=w,
        action=lambda g, v: v + np.array([float(np.ravel(g)[0]), 0.0]),
        inf_action=lambda a, v: np.array([float(np.ravel(a)[0]), 0.0]),
        momentum=lambda v: np.array([(-v[1]) % 1.0]),
        group=circle_group(),
        dual_group=circle_group(),
        name="symplectic-torus-circle",
    )


def circle_torus(point: Any = None, trivial: bool = False) -> SymplecticSample:
    """``T^2`` with ``dphi1^dphi2``; U(1) translates ``phi1`` backwards; ``J = phi2 mod 1``.

    With ``trivial=True`` the circle acts trivially and ``J`` is constant.
    """
    w = standard_symplectic(1)
    if trivial:
        return SymplecticSample(_point([0.4, 0.7] if point is None else point, 2), w,
                                lambda g, v: v, lambda a, v: np.zeros(2),
                                lambda v: np.array([0.25]), circle_group(), circle_group(),
                                "circle-torus-trivial")
    return SymplecticSample(
        point=_point([0.4, 0.7] if point is None else point, 2),
        omega=w,
        action=lambda g, v: v - np.array([float(np.ravel(g)[0]), 0.0]),
        inf_action=lambda a, v: np.array([-float(np.ravel(a)[0]), 0.0]),
        momentum=lambda v: np.array([v[1] % 1.0]),
        group=circle_group(),
        dual_group=circle_group(),
        name="circle-torus",
    )


def t4_omega() -> np.ndarray:
    """``dphi1^dphi2 + sqrt(2) dpsi1^dpsi2`` in coordinates ``(phi1, phi2, psi1, psi2)``."""
    w = np.zeros((4, 4))
    w[0, 1], w[1, 0] = 1.0, -1.0
    w[2, 3], w[3, 2] = SQRT2, -SQRT2
    return w


T4_GENERATOR = np.array([-1.0, 0.0, -1.0, 0.0])


def t4_system(point: Any = None, dual: str = "R") -> SymplecticSample:
    """The diagonal circle acting on ``T^4`` with the irrational symplectic form.

    The momentum slot holds the locally valid candidate ``phi2 + sqrt(2) psi2``
    (covering chart), which does not descend to the torus.
    """
    dual_group = VectorGroupModel(1) if dual == "R" else circle_group()
    return SymplecticSample(
        point=_point([0.2, 0.3, 0.4, 0.5] if point is None else point, 4),
        omega=t4_omega(),
        action=lambda g, v: v + float(np.ravel(g)[0]) * T4_GENERATOR,
        inf_action=lambda a, v: float(np.ravel(a)[0]) * T4_GENERATOR,
        momentum=lambda v: np.array([v[1] + SQRT2 * v[3]]),
        group=circle_group(),
        dual_group=dual_group,
        name="t4-diagonal-circle",
    )


def t4_product_system(point: Any = None) -> SymplecticSample:
    """``U(1) x U(1)`` acting on ``T^4`` factorwise, candidate ``(phi2, sqrt(2) psi2)``."""
    gens = np.array([[-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0]])
    return SymplecticSample(
        point=_point([0.2, 0.3, 0.4, 0.5] if point is None else point, 4),
        omega=t4_omega(),
        action=lambda g, v: v + np.asarray(g, dtype=float) @ gens,
        inf_action=lambda a, v: np.asarray(a, dtype=float) @ gens,
        momentum=lambda v: np.array([v[1], SQRT2 * v[3]]),
        group=TorusGroupModel(np.eye(2)),
        dual_group=TorusGroupModel(np.eye(2)),
        name="t4-product-circle",
    )


def lattice_quotient_r4(point: Any = None) -> SymplecticSample:
    """``R^4 / Z^4`` with ``dq^dp``; ``R`` translates ``q1``; ``J = -p1`` mod 1."""
    w = standard_symplectic(2)
    e = np.array([1.0, 0.0, 0.0, 0.0])
    return SymplecticSample(
        point=_point([0.1, 0.2, 0.3, 0.4] if point is None else point, 4),
        omega=w,
        action=lambda g, v: v + float(np.ravel(g)[0]) * e,
        inf_action=lambda a, v: float(np.ravel(a)[0]) * e,
        momentum=lambda v: np.array([(-v[2]) % 1.0]),
        group=circle_group(),
        dual_group=circle_group(),
        name="lattice-quotient-r4",
    )


def quartic_lattice_hamiltonian() -> Hamiltonian:
    """A ``q1``-translation invariant quartic Hamiltonian on ``R^4``."""
    def value(z):
        q1, q2, p1, p2 = z
        r = p1 ** 2 + q2 ** 2 + p2 ** 2
        return 0.25 * r ** 2 + 0.5 * r + 0.3 * p1 * p2

    def gradient(z):
        q1, q2, p1, p2 = z
        r = p1 ** 2 + q2 ** 2 + p2 ** 2
        c = r + 1.0
        return np.array([0.0, q2 * c, p1 * c + 0.3 * p2, p2 * c + 0.3 * p1])

    return Hamiltonian(value, gradient)


# ---------------------------------------------------------------------------
# Oscillators
# ---------------------------------------------------------------------------


def _shear(z, eps):
    q, p = z
    return np.array([q, p + eps * q * q])


def _unshear(y, eps):
    q, p = y
    return np.array([q, p - eps * q * q])


def sheared_oscillator(point: Any = None, eps: float = 0.0) -> SymplecticSample:
    """Rotations conjugated by the symplectic shear ``(q, p) -> (q, p + eps q^2)``.

    ``eps = 0`` is the harmonic oscillator with its angular momentum; for
    ``eps != 0`` the momentum map ``J = -|Phi(z)|^2 / 2`` is quartic, so the
    implicit midpoint rule no longer conserves it exactly.
    """
    w = standard_symplectic(1)
    h = np.array([[0.0, 1.0], [-1.0, 0.0]])

    def action(g, z):
        t = float(np.ravel(g)[0])
        c, s = math.cos(t), math.sin(t)
        return _unshear(np.array([[c, s], [-s, c]]) @ _shear(z, eps), eps)

    def inf_action(a, z):
        y = _shear(z, eps)
        v = float(np.ravel(a)[0]) * (h @ y)
        # inverse of D(shear) = [[1, 0], [2 eps q, 1]]
        return np.array([v[0], v[1] - 2 * eps * z[0] * v[0]])

    return SymplecticSample(
        point=_point([1.0, 0.0] if point is None else point, 2),
        omega=w,
        action=action,
        inf_action=inf_action,
        momentum=lambda z: np.array([-0.5 * float(_shear(z, eps) @ _shear(z, eps))]),
        group=VectorGroupModel(1),
        dual_group=VectorGroupModel(1),
        name="sheared-oscillator" if eps else "harmonic-oscillator",
    )


def sheared_oscillator_hamiltonian(eps: float = 0.0) -> Hamiltonian:
    """``H = |Phi(z)|^2 / 2`` with exact gradient."""
    def value(z):
        y = _shear(z, eps)
        return 0.5 * float(y @ y)

    def gradient(z):
        q, p = z
        y1 = p + eps * q * q
        return np.array([q + 2 * eps * q * y1, y1])

    return Hamiltonian(value, gradient)


# ---------------------------------------------------------------------------
# Matrix dual pair
# ---------------------------------------------------------------------------


def matrix_space_omega(n: int) -> np.ndarray:
    """Chart matrix of ``tr(X^T J Y)`` on row-major flattened ``2n x 2n`` matrices."""
    return np.kron(standard_symplectic(n), np.eye(2 * n))


def j_sp(x: np.ndarray) -> np.ndarray:
    n = x.shape[0] // 2
    return -x @ x.T @ standard_symplectic(n)


def j_o(x: np.ndarray) -> np.ndarray:
    n = x.shape[0] // 2
    return x.T @ standard_symplectic(n) @ x


def matrix_space_sp(x: Any) -> ExampleSystem:
    """``Sp(2n)`` acting by left multiplication on ``M(2n x 2n)``, ``J = -X X^T J``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]

    def mat(v):
        return np.asarray(v).reshape(m, m)

    sample = SymplecticSample(
        point=x.reshape(-1),
        omega=matrix_space_omega(m // 2),
        action=lambda g, v: (np.asarray(g) @ mat(v)).reshape(-1),
        inf_action=lambda a, v: (np.asarray(a) @ mat(v)).reshape(-1),
        momentum=lambda v: j_sp(mat(v)),
        group=MatrixGroupModel(m, "sp2nR"),
        dual_group=VectorGroupModel((m, m)),
        name="matrix-space-sp",
    )
    pairing = sp_pairing(m // 2)
    return ExampleSystem(sample, pairing, pairing.basis_left)


def matrix_space_o(x: Any) -> ExampleSystem:
    """``O(2n)`` acting by ``X -> X g^{-1}`` on ``M(2n x 2n)``, ``J = X^T J X``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]

    def mat(v):
        return np.asarray(v).reshape(m, m)

    sample = SymplecticSample(
        point=x.reshape(-1),
        omega=matrix_space_omega(m // 2),
        action=lambda g, v: (mat(v) @ np.linalg.inv(np.asarray(g))).reshape(-1),
        inf_action=lambda a, v: (-mat(v) @ np.asarray(a)).reshape(-1),
        momentum=lambda v: j_o(mat(v)),
        group=MatrixGroupModel(m, "o_n"),
        dual_group=VectorGroupModel((m, m)),
        name="matrix-space-o",
    )
    pairing = o_pairing(m)
    return ExampleSystem(sample, pairing, pairing.basis_left)


def o_invariant_quartic(m: int) -> Hamiltonian:
    """``H = |J_Sp(X)|_F^2 / 8``: invariant under the right ``O(2n)`` action."""
    jmat = standard_symplectic(m // 2)

    def value(v):
        js = j_sp(np.asarray(v).reshape(m, m))
        return float(np.sum(js * js)) / 8.0

    def gradient(v):
        x = np.asarray(v).reshape(m, m)
        js = j_sp(x)
        # djs = -(dX X^T + X dX^T) J, so dH = tr(js^T djs) / 4
        g = -(js @ jmat.T @ x + jmat @ js.T @ x) / 4.0
        return g.reshape(-1)

    return Hamiltonian(value, gradient)


def sp_invariant_quartic(m: int) -> Hamiltonian:
    """``H = |J_O(X)|_F^2 / 8``: invariant under the left ``Sp(2n)`` action."""
    jmat = standard_symplectic(m // 2)

    def value(v):
        jo = j_o(np.asarray(v).reshape(m, m))
        return float(np.sum(jo * jo)) / 8.0

    def gradient(v):
        x = np.asarray(v).reshape(m, m)
        jo = j_o(x)
        # d tr(jo^T jo)/8 = tr(jo^T djo)/4, djo = dX^T J X + X^T J dX
        g = (jmat @ x @ jo.T + jmat.T @ x @ jo) / 4.0
        return g.reshape(-1)

    return Hamiltonian(value, gradient)


__all__ = [
    "ExampleSystem", "symplectic_vector_space", "symplectic_torus", "symplectic_torus_circle",
    "circle_torus", "t4_omega", "t4_system", "t4_product_system", "lattice_quotient_r4",
    "quartic_lattice_hamiltonian", "sheared_oscillator", "sheared_oscillator_hamiltonian",
    "matrix_space_omega", "matrix_space_sp", "matrix_space_o", "j_sp", "j_o",
    "o_invariant_quartic", "sp_invariant_quartic", "circle_pairing",
]
