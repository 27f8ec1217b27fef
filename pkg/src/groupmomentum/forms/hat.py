"""Hat products on section spaces and grid-scale momentum maps.

For a trivial bundle ``E = M x R^d`` over a grid torus ``M`` of dimension
``n``, a ``k``-form ``alpha`` on ``M`` and an ``l``-form ``omega`` on ``E``
define an ``r``-form on the space of sections, ``r = k + l - n``:

    ``(alpha ^ omega)_phi(Y_1, ..., Y_r)
        = (-1)^{kr} int_M alpha ^ omega_phi(Y_1, ..., Y_r, T phi ., ..., T phi .)``.

With ``alpha = mu`` a volume form and ``l = 2`` this is the symplectic form
``Omega_phi(Y_1, Y_2) = int_M omega_phi(Y_1, Y_2) mu`` on sections.  The
module also evaluates the momentum maps of gauge transformations, of
quantomorphisms of a line bundle over a surface and of gauge
transformations on connections (curvature wedge a power of the base form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from ..errors import (
    ConstraintViolation,
    DegreeMismatch,
    DimensionMismatch,
    NonRealOutput,
    ShapeMismatch,
)
from ..lie_core import VectorGroupModel, vector_pairing
from ..momentum import SymplecticSample
from .calculus import contraction, exterior_derivative, gradient, integrate_top, partial, \
    translate, translate_values, wedge
from .grid import DiscreteFormField, Grid, SectionGrid, index_lookup, multi_indices, sort_sign

ANTISYMMETRY_TOL = 1e-12
REAL_TOL = 1e-12


# ---------------------------------------------------------------------------
# Forms on the total space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TotalSpaceForm:
    """An ``l``-form on ``E = M x R^d`` given by an evaluator.

    Coordinates on ``E`` are the base coordinates followed by the fiber
    coordinates.

    Attributes:
        degree: Form degree ``l``.
        base_dim: ``n = dim M``.
        fiber_dim: ``d``.
        func: ``(points, values) -> components`` where ``points`` has shape
            ``(..., n)``, ``values`` has shape ``(..., d)`` and the result has
            shape ``(..., C(n + d, l))`` in increasing multi-index order.
    """

    degree: int
    base_dim: int
    fiber_dim: int
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]

    @property
    def total_dim(self) -> int:
        return self.base_dim + self.fiber_dim

    def components(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        comps = np.asarray(self.func(points, values))
        count = math.comb(self.total_dim, self.degree)
        if comps.shape[-1] != count:
            raise ShapeMismatch(f"form evaluator returned {comps.shape[-1]} components, expected {count}")
        return np.broadcast_to(comps, points.shape[:-1] + (count,))

    def evaluate(self, points: np.ndarray, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        """``omega_{(m, y)}(v_1, ..., v_l)`` for node-wise vectors ``(..., l, n + d)``."""
        comps = self.components(points, values)
        if self.degree == 0:
            return comps[..., 0]
        out = np.zeros(points.shape[:-1])
        for c, idx in enumerate(multi_indices(self.total_dim, self.degree)):
            minor = vectors[..., :, list(idx)]
            out = out + comps[..., c] * np.linalg.det(minor)
        return out

    def contract(self, vector: Sequence[float]) -> "TotalSpaceForm":
        """Interior product with a constant vector on ``E``."""
        if self.degree == 0:
            raise DegreeMismatch("cannot contract a 0-form")
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (self.total_dim,):
            raise ShapeMismatch("contraction vector must live on the total space")
        lookup = index_lookup(self.total_dim, self.degree)
        plan = []
        for J in multi_indices(self.total_dim, self.degree - 1):
            terms = []
            for i in range(self.total_dim):
                sign, key = sort_sign((i,) + J)
                if sign:
                    terms.append((i, sign, lookup[key]))
            plan.append(terms)
        parent = self

        def func(points, values):
            comps = parent.components(points, values)
            out = [sum(vec[i] * s * comps[..., c] for i, s, c in terms) if terms
                   else np.zeros(points.shape[:-1]) for terms in plan]
            return np.stack(out, axis=-1)

        return TotalSpaceForm(self.degree - 1, self.base_dim, self.fiber_dim, func)

    def translated(self, base_shift: Sequence[float], fiber_shift: Sequence[float]) -> "TotalSpaceForm":
        """Pull-back along ``(m, y) -> (m + a, y + b)``."""
        a = np.asarray(base_shift, dtype=float)
        b = np.asarray(fiber_shift, dtype=float)
        parent = self
        return TotalSpaceForm(self.degree, self.base_dim, self.fiber_dim,
                              lambda p, v: parent.components(p + a, v + b))


def _section_values(phi: Any, grid: Grid) -> np.ndarray:
    vals = phi.values if isinstance(phi, SectionGrid) else np.asarray(phi, dtype=float)
    if vals.ndim == grid.dim:
        vals = vals[..., None]
    if vals.shape[:grid.dim] != grid.shape:
        raise ShapeMismatch("section does not fit the grid")
    return vals


def _vertical(y: Any, grid: Grid, fiber_dim: int) -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    if arr.shape == (fiber_dim,):
        arr = np.broadcast_to(arr, grid.shape + (fiber_dim,))
    if arr.ndim == grid.dim and fiber_dim == 1:
        arr = arr[..., None]
    if arr.shape != grid.shape + (fiber_dim,):
        raise ShapeMismatch(f"vertical vector of shape {arr.shape} does not fit "
                            f"{grid.shape + (fiber_dim,)}")
    return arr


def section_jacobian(values: np.ndarray, grid: Grid) -> np.ndarray:
    """``D phi`` with shape ``(*shape, d, n)``."""
    return np.stack([np.stack([partial(values[..., a], i, grid) for i in range(grid.dim)], axis=-1)
                     for a in range(values.shape[-1])], axis=-2)


def partial_pullback(omega: TotalSpaceForm, phi: Any, ys: Sequence[Any], grid: Grid) -> DiscreteFormField:
    """``phi^*(Y_r -| ... Y_1 -| (omega o phi))`` as a ``(l - r)``-form on the base grid."""
    n, d = omega.base_dim, omega.fiber_dim
    if grid.dim != n:
        raise DimensionMismatch(f"form expects a {n}-dimensional base, grid has {grid.dim}")
    vals = _section_values(phi, grid)
    if vals.shape[-1] != d:
        raise ShapeMismatch(f"section has fiber dimension {vals.shape[-1]}, form expects {d}")
    r = len(ys)
    if r > omega.degree:
        raise DegreeMismatch(f"cannot insert {r} vectors into a {omega.degree}-form")
    points = grid.points()
    jac = section_jacobian(vals, grid)
    vert = [np.concatenate([np.zeros(grid.shape + (n,)), _vertical(y, grid, d)], axis=-1) for y in ys]
    pushed = [np.concatenate([np.broadcast_to(np.eye(n)[i], grid.shape + (n,)), jac[..., :, i]], axis=-1)
              for i in range(n)]
    parts = []
    for J in multi_indices(n, omega.degree - r):
        vecs = np.stack(vert + [pushed[j] for j in J], axis=-2) if omega.degree else None
        parts.append(omega.evaluate(points, vals, vecs))
    return DiscreteFormField(grid, omega.degree - r, np.stack(parts))


def hat_product_eval(alpha: DiscreteFormField, omega: TotalSpaceForm, phi: Any,
                     ys: Sequence[Any] = ()) -> float:
    """Evaluate ``(alpha ^ omega)_phi(Y_1, ..., Y_r)`` with ``r = k + l - n``.

    Raises:
        DegreeMismatch: If the number of vectors is not ``k + l - n``.
    """
    k, l, n = alpha.degree, omega.degree, alpha.dim
    r = k + l - n
    if r < 0 or len(ys) != r:
        raise DegreeMismatch(f"the hat product has degree {r}; got {len(ys)} vectors")
    pulled = partial_pullback(omega, phi, ys, alpha.grid)
    return float((-1) ** (k * r) * integrate_top(wedge(alpha, pulled)))


def translation_generator(phi: Any, grid: Grid, base_vector: Sequence[float],
                          fiber_vector: Sequence[float]) -> np.ndarray:
    """``Y*_phi = Y o phi - T phi(Y_check)`` for the constant field ``Y = (a, b)`` on ``E``."""
    vals = _section_values(phi, grid)
    a = np.asarray(base_vector, dtype=float)
    b = np.asarray(fiber_vector, dtype=float)
    return b - np.einsum("...ai,i->...a", section_jacobian(vals, grid), a)


def translate_section(phi: Any, grid: Grid, base_shift: Sequence[float],
                      fiber_shift: Sequence[float]) -> np.ndarray:
    """``psi . phi = psi o phi o psi_check^{-1}`` for ``psi(m, y) = (m + a, y + b)``."""
    vals = _section_values(phi, grid)
    a = np.asarray(base_shift, dtype=float)
    out = np.stack([translate_values(vals[..., c], grid, -a) for c in range(vals.shape[-1])], axis=-1)
    return out + np.asarray(fiber_shift, dtype=float)


def transformation_law_residual(alpha: DiscreteFormField, omega: TotalSpaceForm, phi: Any,
                                ys: Sequence[Any], base_shift: Sequence[float],
                                fiber_shift: Sequence[float]) -> float:
    """``|Upsilon_psi^*(alpha ^ omega) - (psi_check^* alpha) ^ (psi^* omega)|`` on given vectors."""
    grid = alpha.grid
    a = np.asarray(base_shift, dtype=float)
    moved_phi = translate_section(phi, grid, a, fiber_shift)
    moved_ys = [np.stack([translate_values(_vertical(y, grid, omega.fiber_dim)[..., c], grid, -a)
                          for c in range(omega.fiber_dim)], axis=-1) for y in ys]
    lhs = hat_product_eval(alpha, omega, moved_phi, moved_ys)
    rhs = hat_product_eval(translate(alpha, a), omega.translated(a, fiber_shift), phi, ys)
    return abs(lhs - rhs)


def contraction_identity_residual(alpha: DiscreteFormField, omega: TotalSpaceForm, phi: Any,
                                  ys: Sequence[Any], base_vector: Sequence[float],
                                  fiber_vector: Sequence[float]) -> float:
    """``|Y* -| (alpha ^ omega) - (Y_check -| alpha) ^ omega - (-1)^k alpha ^ (Y -| omega)|``.

    ``Y = (a, b)`` is a constant (translation) field on ``E`` and ``ys`` are the
    remaining ``r - 1`` vectors.
    """
    grid = alpha.grid
    k = alpha.degree
    y_star = translation_generator(phi, grid, base_vector, fiber_vector)
    lhs = hat_product_eval(alpha, omega, phi, [y_star, *ys])
    first = hat_product_eval(contraction(base_vector, alpha), omega, phi, ys) if k > 0 else 0.0
    total_vec = np.concatenate([np.asarray(base_vector, float), np.asarray(fiber_vector, float)])
    second = hat_product_eval(alpha, omega.contract(total_vec), phi, ys)
    return abs(lhs - first - (-1) ** k * second)


# ---------------------------------------------------------------------------
# Symplectic form on sections
# ---------------------------------------------------------------------------


def _vertical_block(matrix: np.ndarray, fiber_dim: int) -> np.ndarray:
    if matrix.shape[-1] != matrix.shape[-2] or matrix.shape[-1] < fiber_dim:
        raise ShapeMismatch(f"fiber form matrix of shape {matrix.shape[-2:]} cannot act on "
                            f"{fiber_dim}-dimensional fibers")
    return matrix[..., -fiber_dim:, -fiber_dim:]


def hat_symplectic_eval(phi: SectionGrid, y1: Any, y2: Any,
                        omega_fiber: Callable[[np.ndarray], np.ndarray],
                        mu: DiscreteFormField) -> float:
    """``Omega_phi(Y1, Y2) = int_M omega_{phi(m)}(Y1(m), Y2(m)) mu``.

    Args:
        phi: Section (fiber coordinates per node).
        y1, y2: Vertical vectors at ``phi``, shape ``(*shape, d)`` (or constant ``(d,)``).
        omega_fiber: ``values (..., d) -> (..., s, s)`` antisymmetric matrices of a
            2-form on the fiber (``s = d``) or on ``E`` (``s = n + d``); only the
            vertical block is used.
        mu: Volume form on the base.

    Raises:
        ShapeMismatch: If the vectors or the form matrix do not fit.
        DegreeMismatch: If ``mu`` is not of top degree.
    """
    grid = phi.grid
    if mu.grid != grid:
        raise ShapeMismatch("volume form lives on a different grid")
    if mu.degree != grid.dim:
        raise DegreeMismatch("mu must be a volume form")
    d = phi.fiber_dim
    a, b = _vertical(y1, grid, d), _vertical(y2, grid, d)
    w = _vertical_block(np.asarray(omega_fiber(phi.values), dtype=float), d)
    w = np.broadcast_to(w, grid.shape + (d, d))
    skew = float(np.max(np.abs(w + np.swapaxes(w, -1, -2))))
    if skew > ANTISYMMETRY_TOL * max(1.0, float(np.max(np.abs(w)))):
        raise ConstraintViolation(f"fiber form is not antisymmetric ({skew:.3e})")
    integrand = np.zeros(grid.shape)
    for i in range(d):
        for j in range(i + 1, d):
            integrand = integrand + w[..., i, j] * (a[..., i] * b[..., j] - a[..., j] * b[..., i])
    return float(integrate_top(mu * integrand))


# ---------------------------------------------------------------------------
# Gauge momentum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberAction:
    """A Hamiltonian action of a Lie algebra on the fiber.

    Attributes:
        algebra_dim: Dimension of the acting algebra.
        fiber_dim: Fiber dimension ``d``.
        generators: ``values (..., d) -> (..., algebra_dim, d)`` fundamental fields.
        momentum: ``values (..., d) -> (..., algebra_dim)`` equivariant fiber momentum.
        omega: ``values (..., d) -> (..., d, d)`` fiber symplectic matrices.
        name: Label.
    """

    algebra_dim: int
    fiber_dim: int
    generators: Callable[[np.ndarray], np.ndarray]
    momentum: Callable[[np.ndarray], np.ndarray]
    omega: Callable[[np.ndarray], np.ndarray]
    name: str = ""


def plane_rotation_action() -> FiberAction:
    """``SO(2)`` rotating ``(R^2, dx ^ dy)`` with ``J(x, y) = (x^2 + y^2) / 2``."""
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])

    def generators(v):
        return np.stack([-v[..., 1], v[..., 0]], axis=-1)[..., None, :]

    def momentum(v):
        return 0.5 * np.sum(v ** 2, axis=-1)[..., None]

    return FiberAction(1, 2, generators, momentum,
                       lambda v: np.broadcast_to(w, v.shape[:-1] + (2, 2)), "plane-rotation")


@dataclass(frozen=True)
class GaugeMomentum:
    """Node-wise momentum ``J o phi`` and the defining-relation residual.

    Attributes:
        values: ``(*shape, algebra_dim)`` node values of the fiber momentum along ``phi``.
        residual: Max over tests of ``|Omega(Y*, Z) + d<Y, J>(Z)|``.
        pairings: ``<Y, J(phi)> = int <Y, J o phi> mu`` for each test parameter.
    """

    values: np.ndarray
    residual: float
    pairings: tuple


def _paired_momentum(action: FiberAction, vals: np.ndarray, y: np.ndarray, mu: DiscreteFormField) -> float:
    return float(integrate_top(mu * np.sum(y * action.momentum(vals), axis=-1)))


def gauge_momentum_pushforward(phi: SectionGrid, action: FiberAction, mu: DiscreteFormField,
                               gauge_params: Sequence[Any] | None = None,
                               directions: Sequence[Any] | None = None,
                               rng: np.random.Generator | None = None, tests: int = 3,
                               fd_step: float = 1e-5) -> GaugeMomentum:
    """Momentum of the gauge action ``(Y . phi)(m) = Y(m) . phi(m)`` on sections.

    The value is ``J o phi``; it is checked against
    ``Omega_phi(Y*, Z) + d/de <Y, J(phi + e Z)> = 0`` for gauge parameters
    ``Y`` (``(*shape, algebra_dim)`` grids) and variations ``Z``, using a
    central difference of step ``fd_step``.
    """
    grid = phi.grid
    vals = phi.values
    if vals.shape[-1] != action.fiber_dim:
        raise ShapeMismatch("section and fiber action disagree on the fiber dimension")
    rng = np.random.default_rng(0) if rng is None else rng
    shape_y = grid.shape + (action.algebra_dim,)
    shape_z = grid.shape + (action.fiber_dim,)
    if gauge_params is None:
        gauge_params = [rng.standard_normal(shape_y) for _ in range(tests)]
    if directions is None:
        directions = [rng.standard_normal(shape_z) for _ in range(len(gauge_params))]
    worst = 0.0
    pairings = []
    for y, z in zip(gauge_params, directions):
        y = np.broadcast_to(np.asarray(y, dtype=float).reshape(
            np.shape(y) + ((1,) if np.ndim(y) == grid.dim else ())), shape_y)
        z = _vertical(z, grid, action.fiber_dim)
        y_star = np.einsum("...c,...ca->...a", y, action.generators(vals))
        omega_term = hat_symplectic_eval(phi, y_star, z, action.omega, mu)
        plus = _paired_momentum(action, vals + fd_step * z, y, mu)
        minus = _paired_momentum(action, vals - fd_step * z, y, mu)
        worst = max(worst, abs(omega_term + (plus - minus) / (2 * fd_step)))
        pairings.append(_paired_momentum(action, vals, y, mu))
    return GaugeMomentum(np.array(action.momentum(vals)), worst, tuple(pairings))


def product_rotation_system(phi: SectionGrid, mu: DiscreteFormField) -> SymplecticSample:
    """Sections of ``M x R^2`` as the finite product ``(R^2)^nodes`` with the diagonal rotation.

    The symplectic form is ``sum_m w_m mu_m dx_m ^ dy_m`` (quadrature weight
    times volume density) and the momentum of the rotation is
    ``sum_m w_m mu_m |phi_m|^2 / 2``.
    """
    grid = phi.grid
    if phi.fiber_dim != 2:
        raise ShapeMismatch("the product rotation system needs planar fibers")
    dens = (mu.data[0] * grid.weights()).reshape(-1)
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.kron(np.diag(dens), w)

    def rotate(g, z):
        c, s = math.cos(float(np.ravel(g)[0])), math.sin(float(np.ravel(g)[0]))
        pts = z.reshape(-1, 2)
        return np.column_stack([c * pts[:, 0] - s * pts[:, 1], s * pts[:, 0] + c * pts[:, 1]]).reshape(-1)

    def inf(a, z):
        pts = z.reshape(-1, 2)
        return float(np.ravel(a)[0]) * np.column_stack([-pts[:, 1], pts[:, 0]]).reshape(-1)

    def momentum(z):
        return np.array([0.5 * float(np.sum(dens * np.sum(z.reshape(-1, 2) ** 2, axis=1)))])

    return SymplecticSample(phi.values.reshape(-1), omega, rotate, inf, momentum,
                            VectorGroupModel(1), VectorGroupModel(1), "product-rotation")


def product_rotation_pairing():
    """Pairing of the rotation algebra ``R`` with its dual used by :func:`product_rotation_system`."""
    return vector_pairing(1)


# ---------------------------------------------------------------------------
# Quantomorphism and curvature momenta
# ---------------------------------------------------------------------------


def quantomorphism_momentum(phi: SectionGrid, k: int, omega_base: DiscreteFormField) -> DiscreteFormField:
    """``-2k |phi|^2 omega + (i/2) d phi ^ d conj(phi)`` for a complex section over a surface.

    Raises:
        DimensionMismatch: If the base is not 2-dimensional.
        NonRealOutput: If the result has an imaginary part above rounding level.
    """
    grid = phi.grid
    if grid.dim != 2:
        raise DimensionMismatch("the quantomorphism momentum is implemented for surfaces")
    if omega_base.grid != grid or omega_base.degree != 2:
        raise ShapeMismatch("omega must be a 2-form on the section's grid")
    z = phi.complex()
    dz = gradient(z, grid)
    dz_bar = dz.with_data(np.conj(dz.data))
    kinetic = wedge(dz, dz_bar) * (0.5j)
    total = kinetic.data - 2 * int(k) * (np.abs(z) ** 2)[None] * omega_base.data
    scale = max(1.0, float(np.max(np.abs(total.real))))
    imag = float(np.max(np.abs(total.imag)))
    if imag > REAL_TOL * scale:
        raise NonRealOutput(f"momentum has an imaginary part of size {imag:.3e}")
    return DiscreteFormField(grid, 2, total.real)


def curvature(gamma: DiscreteFormField) -> DiscreteFormField:
    """``d Gamma + Gamma ^ Gamma`` for a matrix-valued 1-form (``= d Gamma + [Gamma ^ Gamma] / 2``)."""
    if gamma.degree != 1 or len(gamma.value_shape) != 2:
        raise ShapeMismatch("a connection is a matrix-valued 1-form")
    return exterior_derivative(gamma) + wedge(gamma, gamma, np.matmul)


def curvature_momentum(gamma: DiscreteFormField, sigma: DiscreteFormField) -> DiscreteFormField:
    """``curv Gamma ^ sigma^(n - 1)`` on a ``2n``-dimensional base (``sigma^0 = 1``)."""
    dim = gamma.dim
    if dim % 2:
        raise DimensionMismatch("the base of the curvature momentum has even dimension")
    if sigma.grid != gamma.grid or sigma.degree != 2:
        raise ShapeMismatch("sigma must be a 2-form on the connection's grid")
    out = curvature(gamma)
    for _ in range(dim // 2 - 1):
        out = wedge(out, sigma)
    return out


def gauge_transform(gamma: DiscreteFormField, g: np.ndarray) -> DiscreteFormField:
    """``g Gamma g^{-1} + g d(g^{-1})`` for a grid of invertible matrices ``g``."""
    grid = gamma.grid
    g_inv = np.linalg.inv(g)
    d_ginv = np.stack([partial(g_inv, i, grid) for i in range(grid.dim)])
    data = g[None] @ gamma.data @ g_inv[None] + g[None] @ d_ginv
    return gamma.with_data(data)


def maurer_cartan_form(g: np.ndarray, grid: Grid) -> DiscreteFormField:
    """``g^{-1} dg`` for a grid of invertible matrices."""
    g_inv = np.linalg.inv(g)
    return DiscreteFormField(grid, 1, np.stack([g_inv @ partial(g, i, grid) for i in range(grid.dim)]))
