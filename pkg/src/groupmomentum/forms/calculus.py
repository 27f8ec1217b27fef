"""Exterior calculus on uniform grids.

Derivatives are spectral (Fourier) along periodic axes and eighth-order
finite differences along non-periodic axes, with one-sided nine-point
stencils near the ends.  All operations return fresh fields.

Conventions: ``(d alpha)_J = sum_p (-1)^p d_{j_p} alpha_{J - j_p}``; the wedge
product is the shuffle sum ``(a ^ b)_K = sum sign(I, J) a_I b_J`` over
splittings ``K = I u J``; contraction inserts the vector into the first slot;
the fiber integral over trailing axes ``F`` keeps the components ``(I, F)``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Any, Callable, Sequence

import numpy as np

from ..errors import DegreeMismatch, DegreeOverflow, InsufficientSamples, LayoutMismatch, ShapeMismatch
from .grid import DiscreteFormField, Grid, VectorFieldGrid, index_lookup, multi_indices, sort_sign

FD_POINTS = 9


# ---------------------------------------------------------------------------
# One-dimensional derivatives
# ---------------------------------------------------------------------------


def stencil_weights(offsets: Sequence[float], order: int = 1) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at offset 0.

    Solves the moment (Vandermonde) system ``sum_i w_i s_i^j / j! = delta_{j, order}``
    for unit spacing.
    """
    s = np.asarray(offsets, dtype=float)
    m = len(s)
    if order >= m:
        raise InsufficientSamples(f"{m} points cannot resolve derivative order {order}")
    vander = np.array([s ** j / math.factorial(j) for j in range(m)])
    rhs = np.zeros(m)
    rhs[order] = 1.0
    return np.linalg.solve(vander, rhs)


@lru_cache(maxsize=64)
def fd_matrix(n: int, spacing: float, points: int = FD_POINTS) -> np.ndarray:
    """Dense first-derivative matrix on ``n`` equispaced nodes of a closed interval.

    Interior rows use the centred ``points``-point stencil; rows within
    ``points // 2`` of either end use the nearest one-sided window of the
    same width.
    """
    if n < 2:
        raise InsufficientSamples("need at least two nodes")
    width = min(points, n)
    half = width // 2
    mat = np.zeros((n, n))
    for i in range(n):
        start = min(max(i - half, 0), n - width)
        cols = np.arange(start, start + width)
        mat[i, cols] = stencil_weights(cols - i)
    mat /= spacing
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=64)
def _wavenumbers(n: int, length: float, real: bool) -> np.ndarray:
    if real:
        k = np.fft.rfftfreq(n, d=length / n) * 2 * math.pi
    else:
        k = np.fft.fftfreq(n, d=length / n) * 2 * math.pi
    if n % 2 == 0:
        # The Nyquist mode has no well-defined odd derivative.
        k = k.copy()
        k[n // 2] = 0.0
    k.setflags(write=False)
    return k


def _shape_for_axis(k: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = k.size
    return k.reshape(shape)


def partial(arr: np.ndarray, axis: int, grid: Grid) -> np.ndarray:
    """Partial derivative of node values along a grid axis.

    Args:
        arr: Array whose leading ``grid.dim`` axes are the grid axes.
        axis: Grid axis to differentiate along.
        grid: The grid.

    Returns:
        Array of the same shape.
    """
    arr = np.asarray(arr)
    n = grid.shape[axis]
    if grid.periodic[axis]:
        if np.iscomplexobj(arr):
            k = _wavenumbers(n, grid.lengths[axis], False)
            spec = np.fft.fft(arr, axis=axis)
            return np.fft.ifft(1j * _shape_for_axis(k, arr.ndim, axis) * spec, axis=axis)
        k = _wavenumbers(n, grid.lengths[axis], True)
        spec = np.fft.rfft(arr, axis=axis)
        return np.fft.irfft(1j * _shape_for_axis(k, arr.ndim, axis) * spec, n=n, axis=axis)
    mat = fd_matrix(n, grid.spacing[axis])
    return np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis)


def translate_values(arr: np.ndarray, grid: Grid, shift: Sequence[float]) -> np.ndarray:
    """Node values of ``x -> f(x + shift)`` by Fourier phase shifts.

    Exact (up to rounding) for band-limited data and for shifts that are
    multiples of the spacing.
    """
    arr = np.asarray(arr)
    shift = np.broadcast_to(np.asarray(shift, dtype=float), (grid.dim,))
    out = arr
    for ax in range(grid.dim):
        if shift[ax] == 0.0:
            continue
        if not grid.periodic[ax]:
            raise LayoutMismatch("translations need periodic axes")
        n = grid.shape[ax]
        k = np.fft.fftfreq(n, d=grid.lengths[ax] / n) * 2 * math.pi
        phase = np.exp(1j * k * shift[ax])
        if n % 2 == 0:
            # Keep the Nyquist mode real so real data stays real.
            phase[n // 2] = math.cos(k[n // 2] * shift[ax])
        spec = np.fft.fft(out, axis=ax) * _shape_for_axis(phase, out.ndim, ax)
        out = np.fft.ifft(spec, axis=ax)
        if not np.iscomplexobj(arr):
            out = out.real
    return np.array(out)


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------


def exterior_derivative(f: DiscreteFormField) -> DiscreteFormField:
    """The exterior derivative of a sampled form.

    Raises:
        DegreeOverflow: If ``f`` already has top degree.
    """
    k = f.degree
    if k >= f.dim:
        raise DegreeOverflow(f"cannot differentiate a {k}-form in dimension {f.dim}")
    lookup = index_lookup(f.dim, k)
    cache: dict[tuple[int, int], np.ndarray] = {}
    out_idx = multi_indices(f.dim, k + 1)
    data = np.zeros((len(out_idx),) + f.data.shape[1:], dtype=f.data.dtype)
    for n, J in enumerate(out_idx):
        for p, axis in enumerate(J):
            rest = J[:p] + J[p + 1:]
            c = lookup[rest]
            key = (c, axis)
            if key not in cache:
                cache[key] = partial(f.data[c], axis, f.grid)
            data[n] += (-1) ** p * cache[key]
    return DiscreteFormField(f.grid, k + 1, data)


def gradient(values: Any, grid: Grid) -> DiscreteFormField:
    """``d`` of a scalar grid."""
    return exterior_derivative(DiscreteFormField.scalar(grid, values))


def _expand(arr: np.ndarray, grid_dim: int, extra: int) -> np.ndarray:
    return arr.reshape(arr.shape + (1,) * extra)


def wedge(a: DiscreteFormField, b: DiscreteFormField,
          product: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None) -> DiscreteFormField:
    """Nodewise wedge product (shuffle sum).

    Args:
        a: Left factor.
        b: Right factor.
        product: Bilinear product of component values (default: elementwise
            multiplication with broadcasting; pass ``np.matmul`` for
            matrix-valued forms).

    Raises:
        DegreeOverflow: If ``deg a + deg b > dim``.
        ShapeMismatch: If the grids differ.
    """
    if a.grid != b.grid:
        raise ShapeMismatch("wedge factors live on different grids")
    p, q = a.degree, b.degree
    if p + q > a.dim:
        raise DegreeOverflow(f"degree {p} + {q} exceeds dimension {a.dim}")
    va, vb = a.value_shape, b.value_shape
    if product is None:
        if va and not vb:
            def product(x, y):
                return x * _expand(y, a.dim, len(va))
        elif vb and not va:
            def product(x, y):
                return _expand(x, a.dim, len(vb)) * y
        else:
            product = np.multiply
    la, lb = index_lookup(a.dim, p), index_lookup(a.dim, q)
    out_idx = multi_indices(a.dim, p + q)
    parts = []
    for K in out_idx:
        total = None
        for I in multi_indices(len(K), p):
            Ik = tuple(K[i] for i in I)
            Jk = tuple(x for x in K if x not in Ik)
            sign, _ = sort_sign(Ik + Jk)
            term = product(a.data[la[Ik]], b.data[lb[Jk]])
            term = term if sign > 0 else -term
            total = term if total is None else total + term
        parts.append(total)
    return DiscreteFormField(a.grid, p + q, np.stack(parts))


def _vector_components(x: Any, grid: Grid) -> list[np.ndarray]:
    if isinstance(x, VectorFieldGrid):
        if x.grid != grid:
            raise ShapeMismatch("vector field lives on a different grid")
        return [x.data[i] for i in range(grid.dim)]
    vec = np.asarray(x, dtype=float)
    if vec.shape == (grid.dim,):
        return [np.full(grid.shape, v) for v in vec]
    if vec.shape == (grid.dim,) + grid.shape:
        return list(vec)
    raise ShapeMismatch(f"vector of shape {vec.shape} does not fit grid {grid.shape}")


def contraction(x: Any, f: DiscreteFormField) -> DiscreteFormField:
    """Interior product ``x -| f`` (vector inserted into the first slot).

    Args:
        x: A :class:`VectorFieldGrid`, a constant vector, or a ``(dim, *shape)`` array.
        f: A form of degree at least 1.

    Raises:
        DegreeMismatch: If ``f`` is a function.
    """
    if f.degree == 0:
        raise DegreeMismatch("cannot contract a 0-form")
    comps = _vector_components(x, f.grid)
    out_idx = multi_indices(f.dim, f.degree - 1)
    extra = len(f.value_shape)
    data = np.zeros((len(out_idx),) + f.data.shape[1:], dtype=f.data.dtype)
    for n, J in enumerate(out_idx):
        for i in range(f.dim):
            if i in J:
                continue
            data[n] += _expand(comps[i], f.dim, extra) * f.component((i,) + J)
    return DiscreteFormField(f.grid, f.degree - 1, data)


def integrate_top(f: DiscreteFormField) -> Any:
    """Integral of a top-degree form (trapezoid rule; spectral for periodic data).

    Raises:
        DegreeMismatch: If ``f`` is not of top degree.
    """
    if f.degree != f.dim:
        raise DegreeMismatch(f"integrate_top needs a {f.dim}-form, got degree {f.degree}")
    w = f.grid.weights()
    w = w.reshape(w.shape + (1,) * len(f.value_shape))
    total = np.sum(f.data[0] * w, axis=tuple(range(f.dim)))
    return total.item() if np.ndim(total) == 0 else total


def fiber_integrate(f: DiscreteFormField, fiber_axes: Sequence[int]) -> DiscreteFormField:
    """Integrate a form on ``M x F`` over the closed fiber ``F``.

    The fiber must occupy the trailing, periodic axes of the product grid.
    The result has components ``(int_F alpha)_I = int_F alpha_{(I, F)} dvol_F``.

    Raises:
        LayoutMismatch: If the fiber axes are not trailing or not periodic.
        DegreeMismatch: If ``deg f < dim F``.
    """
    axes = tuple(sorted(int(a) for a in fiber_axes))
    m = len(axes)
    base_dim = f.dim - m
    if axes != tuple(range(base_dim, f.dim)) or m == 0 or base_dim < 1:
        raise LayoutMismatch(f"fiber axes {tuple(fiber_axes)} must be the trailing axes of the grid")
    if not all(f.grid.periodic[a] for a in axes):
        raise LayoutMismatch("fiber integration needs a closed (periodic) fiber")
    if f.degree < m:
        raise DegreeMismatch(f"cannot integrate a {f.degree}-form over a {m}-dimensional fiber")
    base = f.grid.sub(range(base_dim))
    w = f.grid.weights(axes)
    w = w.reshape((1,) * base_dim + w.shape + (1,) * len(f.value_shape))
    lookup = index_lookup(f.dim, f.degree)
    parts = []
    for I in multi_indices(base_dim, f.degree - m):
        comp = f.data[lookup[I + axes]]
        parts.append(np.sum(comp * w, axis=axes))
    return DiscreteFormField(base, f.degree - m, np.stack(parts))


def pullback_projection(f: DiscreteFormField, product_grid: Grid) -> DiscreteFormField:
    """Pull a form on the base ``M`` back to ``M x F`` along the projection."""
    base_dim = f.dim
    if product_grid.sub(range(base_dim)) != f.grid:
        raise LayoutMismatch("the base grid must be the leading factor of the product grid")
    extra = product_grid.dim - base_dim
    fiber_shape = product_grid.shape[base_dim:]
    lookup = index_lookup(product_grid.dim, f.degree)
    data = np.zeros((len(lookup),) + product_grid.shape + f.value_shape, dtype=f.data.dtype)
    for n, I in enumerate(f.indices):
        comp = f.data[n].reshape(f.grid.shape + (1,) * extra + f.value_shape)
        data[lookup[I]] = np.broadcast_to(comp, product_grid.shape + f.value_shape)
    return DiscreteFormField(product_grid, f.degree, data)


def translate(f: DiscreteFormField, shift: Sequence[float]) -> DiscreteFormField:
    """Pull-back of a form along the translation ``x -> x + shift``."""
    return f.with_data(np.stack([translate_values(c, f.grid, shift) for c in f.data]))


def relative_max(a: np.ndarray, scale: float) -> float:
    """``max|a| / max(scale, 1e-300)``."""
    return float(np.max(np.abs(a))) / max(float(scale), 1e-300)
