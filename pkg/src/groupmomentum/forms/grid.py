"""Uniform grids and the sampled fields that live on them.

A :class:`Grid` is a box ``[0, L_1) x ... x [0, L_d)`` sampled at ``N_i``
nodes per axis.  Periodic axes are flat circles (nodes ``i * L / N``);
non-periodic axes are closed intervals ``[0, L]`` sampled at ``N`` nodes
including both ends.  A :class:`DiscreteFormField` stores one array per
strictly increasing multi-index ``I = (i_1 < ... < i_k)``, the value at a
node being ``alpha(e_{i_1}, ..., e_{i_k})`` (Bourbaki convention, so that
``dx ^ dy`` evaluates to 1 on the ordered coordinate frame).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Sequence

import numpy as np

from ..errors import ConstraintViolation, DegreeOverflow, ShapeMismatch

FIBER_CONSTRAINT_TOL = 1e-12


@lru_cache(maxsize=None)
def multi_indices(dim: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Strictly increasing multi-indices of length ``degree`` in lexicographic order."""
    if degree < 0 or degree > dim:
        raise DegreeOverflow(f"degree {degree} is outside 0..{dim}")
    return tuple(itertools.combinations(range(dim), degree))


@lru_cache(maxsize=None)
def index_lookup(dim: int, degree: int) -> dict[tuple[int, ...], int]:
    """Position of each multi-index in :func:`multi_indices`."""
    return {idx: k for k, idx in enumerate(multi_indices(dim, degree))}


def sort_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``indices`` and the sorted tuple.

    Returns ``(0, ())`` when an index repeats.
    """
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign, tuple(sorted(idx))


@dataclass(frozen=True)
class Grid:
    """A uniform tensor-product grid.

    Attributes:
        shape: Number of nodes per axis.
        lengths: Axis lengths (period for periodic axes, interval length otherwise).
        periodic: Per-axis periodicity flags (default: all periodic).
    """

    shape: tuple[int, ...]
    lengths: tuple[float, ...]
    periodic: tuple[bool, ...] = field(default=None)

    def __post_init__(self) -> None:
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        lengths = tuple(float(x) for x in np.atleast_1d(self.lengths))
        if len(lengths) == 1 and len(shape) > 1:
            lengths = lengths * len(shape)
        periodic = (True,) * len(shape) if self.periodic is None else tuple(
            bool(p) for p in np.atleast_1d(self.periodic))
        if len(periodic) == 1 and len(shape) > 1:
            periodic = periodic * len(shape)
        if not (len(shape) == len(lengths) == len(periodic)) or not shape:
            raise ShapeMismatch("shape, lengths and periodic flags must have one entry per axis")
        if any(n < 2 for n in shape):
            raise ShapeMismatch("every axis needs at least two nodes")
        if any(not (x > 0 and math.isfinite(x)) for x in lengths):
            raise ShapeMismatch("axis lengths must be positive and finite")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "periodic", periodic)

    @classmethod
    def cube(cls, n: int, dim: int = 3, length: float = 2 * math.pi) -> "Grid":
        """Periodic cube with ``n`` nodes and side ``length`` on each of ``dim`` axes."""
        return cls((n,) * dim, (length,) * dim)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n if p else L / (n - 1)
                     for n, L, p in zip(self.shape, self.lengths, self.periodic))

    def axis(self, k: int) -> np.ndarray:
        """Node coordinates along axis ``k``."""
        return np.arange(self.shape[k]) * self.spacing[k]

    def coords(self) -> tuple[np.ndarray, ...]:
        """Broadcast-ready ``ij``-indexed coordinate arrays."""
        return tuple(np.meshgrid(*(self.axis(k) for k in range(self.dim)), indexing="ij",
                                 sparse=False))

    def points(self) -> np.ndarray:
        """Node coordinates stacked on a trailing axis, shape ``(*shape, dim)``."""
        return np.stack(self.coords(), axis=-1)

    def weights(self, axes: Sequence[int] | None = None) -> np.ndarray:
        """Quadrature weights (trapezoid rule) as a broadcastable array over ``axes``."""
        axes = range(self.dim) if axes is None else axes
        w = np.ones(())
        for k in axes:
            wk = np.full(self.shape[k], self.spacing[k])
            if not self.periodic[k]:
                wk[0] *= 0.5
                wk[-1] *= 0.5
            w = np.multiply.outer(w, wk)
        return w

    def as_chart(self) -> "Grid":
        """The same nodes read as a non-periodic covering chart."""
        lengths = tuple(h * (n - 1) for h, n in zip(self.spacing, self.shape))
        return Grid(self.shape, lengths, (False,) * self.dim)

    def sub(self, axes: Sequence[int]) -> "Grid":
        """The grid spanned by a subset of axes."""
        axes = list(axes)
        return Grid(tuple(self.shape[k] for k in axes), tuple(self.lengths[k] for k in axes),
                    tuple(self.periodic[k] for k in axes))

    def product(self, other: "Grid") -> "Grid":
        """The product grid ``self x other`` with ``other``'s axes trailing."""
        return Grid(self.shape + other.shape, self.lengths + other.lengths,
                    self.periodic + other.periodic)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteFormField:
    """A differential ``k``-form sampled on a grid.

    Attributes:
        grid: Underlying grid.
        degree: Form degree ``k``.
        data: Array of shape ``(C(dim, k), *grid.shape, *value_shape)`` holding
            one component per increasing multi-index (see :func:`multi_indices`).
            A trailing ``value_shape`` allows vector- or matrix-valued forms.
    """

    grid: Grid
    degree: int
    data: np.ndarray

    def __post_init__(self) -> None:
        k = int(self.degree)
        if k < 0 or k > self.grid.dim:
            raise DegreeOverflow(f"degree {k} is outside 0..{self.grid.dim}")
        data = np.asarray(self.data)
        if not (np.issubdtype(data.dtype, np.floating) or np.issubdtype(data.dtype, np.complexfloating)):
            data = data.astype(float)
        count = math.comb(self.grid.dim, k)
        if data.ndim < 1 + self.grid.dim or data.shape[0] != count \
                or data.shape[1:1 + self.grid.dim] != self.grid.shape:
            raise ShapeMismatch(
                f"expected component array of shape ({count}, {self.grid.shape}, ...), got {data.shape}")
        object.__setattr__(self, "degree", k)
        object.__setattr__(self, "data", _freeze(data))

    @classmethod
    def from_components(cls, grid: Grid, degree: int,
                        components: dict[tuple[int, ...], Any] | None = None) -> "DiscreteFormField":
        """Build a form from a sparse ``{multi-index: array or scalar}`` mapping.

        Multi-indices may be given in any order; the entry is re-sorted with its
        permutation sign.  Missing components are zero.
        """
        lookup = index_lookup(grid.dim, degree)
        components = components or {}
        values = {}
        for idx, val in components.items():
            sign, key = sort_sign(tuple(idx))
            if key not in lookup or sign == 0:
                raise ShapeMismatch(f"invalid multi-index {idx} for a {degree}-form in {grid.dim}D")
            arr = np.broadcast_to(np.asarray(val), grid.shape + np.shape(val)[grid.dim:]
                                  if np.ndim(val) >= grid.dim else grid.shape)
            values[key] = values.get(key, 0) + sign * arr
        vshape = ()
        dtype = float
        for v in values.values():
            vshape = np.shape(v)[grid.dim:]
            if np.iscomplexobj(v):
                dtype = complex
        data = np.zeros((len(lookup),) + grid.shape + vshape, dtype=dtype)
        for key, val in values.items():
            data[lookup[key]] = val
        return cls(grid, degree, data)

    @classmethod
    def scalar(cls, grid: Grid, values: Any) -> "DiscreteFormField":
        """A 0-form from node values."""
        arr = np.broadcast_to(np.asarray(values), grid.shape + np.shape(values)[grid.dim:]
                              if np.ndim(values) >= grid.dim else grid.shape)
        return cls(grid, 0, arr[None])

    @classmethod
    def from_function(cls, grid: Grid, degree: int,
                      func: Callable[..., dict[tuple[int, ...], Any]]) -> "DiscreteFormField":
        """Sample ``func(*coords) -> {multi-index: values}`` on the grid nodes."""
        return cls.from_components(grid, degree, func(*grid.coords()))

    @classmethod
    def zeros(cls, grid: Grid, degree: int, value_shape: tuple[int, ...] = ()) -> "DiscreteFormField":
        return cls(grid, degree, np.zeros((math.comb(grid.dim, degree),) + grid.shape + value_shape))

    @classmethod
    def volume(cls, grid: Grid, density: Any = 1.0) -> "DiscreteFormField":
        """The top form ``density * dx_1 ^ ... ^ dx_d``."""
        return cls.from_components(grid, grid.dim, {tuple(range(grid.dim)): density})

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def indices(self) -> tuple[tuple[int, ...], ...]:
        return multi_indices(self.grid.dim, self.degree)

    @property
    def value_shape(self) -> tuple[int, ...]:
        return self.data.shape[1 + self.grid.dim:]

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.data))

    def component(self, idx: Sequence[int]) -> np.ndarray:
        """Component along an arbitrary ordering of a multi-index (signed)."""
        sign, key = sort_sign(tuple(idx))
        if sign == 0:
            return np.zeros(self.grid.shape + self.value_shape, dtype=self.data.dtype)
        lookup = index_lookup(self.grid.dim, self.degree)
        if key not in lookup:
            raise ShapeMismatch(f"invalid multi-index {idx}")
        return sign * self.data[lookup[key]]

    def components(self) -> dict[tuple[int, ...], np.ndarray]:
        return {idx: self.data[k] for k, idx in enumerate(self.indices)}

    def with_data(self, data: np.ndarray) -> "DiscreteFormField":
        return DiscreteFormField(self.grid, self.degree, data)

    def real(self) -> "DiscreteFormField":
        return self.with_data(np.real(self.data))

    def imag(self) -> "DiscreteFormField":
        return self.with_data(np.imag(self.data))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def _check(self, other: "DiscreteFormField") -> None:
        if not isinstance(other, DiscreteFormField):
            raise TypeError("expected a DiscreteFormField")
        if other.grid != self.grid or other.degree != self.degree:
            raise ShapeMismatch("forms live on different grids or have different degrees")

    def __add__(self, other: "DiscreteFormField") -> "DiscreteFormField":
        self._check(other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other: "DiscreteFormField") -> "DiscreteFormField":
        self._check(other)
        return self.with_data(self.data - other.data)

    def __neg__(self) -> "DiscreteFormField":
        return self.with_data(-self.data)

    def __mul__(self, scalar: Any) -> "DiscreteFormField":
        """Multiply by a number or by node values (a scalar grid)."""
        s = np.asarray(scalar)
        if s.ndim:
            if s.shape[:self.grid.dim] != self.grid.shape:
                raise ShapeMismatch("scalar field does not match the grid")
            s = s.reshape(s.shape + (1,) * len(self.value_shape))
        return self.with_data(self.data * s)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VectorFieldGrid:
    """A vector field sampled on a grid: one component array per axis.

    Attributes:
        grid: Underlying grid.
        data: Array of shape ``(dim, *grid.shape)``.
    """

    grid: Grid
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=float)
        if data.shape != (self.grid.dim,) + self.grid.shape:
            raise ShapeMismatch(f"expected shape {(self.grid.dim,) + self.grid.shape}, got {data.shape}")
        object.__setattr__(self, "data", _freeze(data))

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[..., Sequence[Any]]) -> "VectorFieldGrid":
        coords = grid.coords()
        comps = func(*coords)
        return cls(grid, np.stack([np.broadcast_to(np.asarray(c, dtype=float), grid.shape)
                                   for c in comps]))

    @classmethod
    def constant(cls, grid: Grid, vector: Sequence[float]) -> "VectorFieldGrid":
        vec = np.asarray(vector, dtype=float)
        return cls(grid, np.broadcast_to(vec.reshape((-1,) + (1,) * grid.dim),
                                         (grid.dim,) + grid.shape))

    def flat(self, metric: Sequence[float] | None = None) -> DiscreteFormField:
        """Index lowering ``v -> v_flat`` for a constant diagonal metric."""
        g = np.ones(self.grid.dim) if metric is None else np.asarray(metric, dtype=float)
        if g.shape != (self.grid.dim,):
            raise ShapeMismatch("metric must be a diagonal with one entry per axis")
        return DiscreteFormField(self.grid, 1, self.data * g.reshape((-1,) + (1,) * self.grid.dim))

    def __mul__(self, scalar: float) -> "VectorFieldGrid":
        return VectorFieldGrid(self.grid, self.data * float(scalar))

    __rmul__ = __mul__


FIBER_KINDS = ("R", "S2", "C")


@dataclass(frozen=True)
class SectionGrid:
    """Samples of a map from the grid into a fiber.

    Attributes:
        grid: Underlying grid (the base).
        values: Array of shape ``(*grid.shape, fiber_dim)``.
        fiber: ``"R"`` (Euclidean ``R^d``), ``"S2"`` (unit vectors in ``R^3``)
            or ``"C"`` (complex numbers stored as real/imaginary pairs).
    """

    grid: Grid
    values: np.ndarray
    fiber: str = "R"

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if self.fiber not in FIBER_KINDS:
            raise ShapeMismatch(f"unknown fiber kind {self.fiber!r}")
        if self.fiber == "C" and np.iscomplexobj(vals):
            vals = np.stack([vals.real, vals.imag], axis=-1)
        vals = np.asarray(vals, dtype=float)
        if vals.ndim == self.grid.dim:
            vals = vals[..., None]
        if vals.shape[:-1] != self.grid.shape:
            raise ShapeMismatch(f"section of shape {vals.shape} does not fit grid {self.grid.shape}")
        if self.fiber == "S2":
            if vals.shape[-1] != 3:
                raise ShapeMismatch("S2-valued sections need three components")
            err = float(np.max(np.abs(np.linalg.norm(vals, axis=-1) - 1.0)))
            if err > FIBER_CONSTRAINT_TOL:
                raise ConstraintViolation(f"S2 section violates the unit-norm constraint by {err:.3e}")
        if self.fiber == "C" and vals.shape[-1] != 2:
            raise ShapeMismatch("complex sections store a real/imaginary pair")
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def fiber_dim(self) -> int:
        return int(self.values.shape[-1])

    def complex(self) -> np.ndarray:
        """Complex node values of a ``"C"`` section."""
        if self.fiber != "C":
            raise ShapeMismatch("only complex sections have complex values")
        return self.values[..., 0] + 1j * self.values[..., 1]

    def component(self, a: int) -> np.ndarray:
        return self.values[..., a]
