"""Helicity, Clebsch representations and Liouville numbers on grids.

The helicity of a divergence-free field ``v`` on a flat 3-torus is
``Hel(v) = int v_flat ^ d v_flat``.  A classical Clebsch representation
``v_flat = f dg + dh`` forces it to vanish; a generalized representation
``v_flat = -phi^* theta + nu`` through a map ``phi`` into the 2-sphere and a
connection ``theta`` on the Hopf bundle produces the Hopf invariant of
``phi`` instead.  The Hopf-type example here is a degree-one collapse of the
periodic box onto the 3-sphere followed by the Hopf projection, so the
pulled-back connection is a global 1-form on the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from ..errors import DimensionMismatch, NotClosedForm, ShapeMismatch
from ..periods import LoopPath
from .calculus import exterior_derivative, gradient, integrate_top, partial, wedge
from .grid import DiscreteFormField, Grid, SectionGrid, VectorFieldGrid, multi_indices

CLEBSCH_MARGIN = 4


# ---------------------------------------------------------------------------
# Helicity
# ---------------------------------------------------------------------------


def helicity_of_form(v_flat: DiscreteFormField) -> float:
    """``int v_flat ^ d v_flat`` for a 1-form on a 3-dimensional grid."""
    if v_flat.dim != 3:
        raise DimensionMismatch(f"helicity needs a 3-dimensional base, got {v_flat.dim}")
    if v_flat.degree != 1:
        raise ShapeMismatch("helicity needs a 1-form")
    return float(integrate_top(wedge(v_flat, exterior_derivative(v_flat))))


def helicity(v: VectorFieldGrid, metric: Sequence[float] | None = None) -> float:
    """Helicity of a sampled vector field for a constant diagonal metric.

    Raises:
        DimensionMismatch: If the grid is not 3-dimensional.
    """
    if v.grid.dim != 3:
        raise DimensionMismatch(f"helicity needs a 3-dimensional base, got {v.grid.dim}")
    return helicity_of_form(v.flat(metric))


def abc_velocity(grid: Grid, a: float = 1.0, b: float = 0.0, c: float = 0.0) -> VectorFieldGrid:
    """The Arnold-Beltrami-Childress field ``(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)``."""
    if grid.dim != 3:
        raise DimensionMismatch("the ABC field lives on a 3-dimensional grid")
    return VectorFieldGrid.from_function(grid, lambda x, y, z: (
        a * np.sin(z) + c * np.cos(y),
        b * np.sin(x) + a * np.cos(z),
        c * np.sin(y) + b * np.cos(x),
    ))


def abc_clebsch_triple(grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Clebsch potentials ``(f, g, h)`` of the ``A = 1, B = C = 0`` ABC field on the covering chart.

    ``f = y sin z - x cos z``, ``g = z``, ``h = x sin z + y cos z``; only ``f dg + dh``
    is periodic, not the potentials themselves.
    """
    x, y, z = grid.coords()
    return y * np.sin(z) - x * np.cos(z), z.copy(), x * np.sin(z) + y * np.cos(z)


def classical_clebsch_field(grid: Grid, phi1: Any, phi2: Any, f: Any = 0.0,
                            metric: Sequence[float] | None = None) -> VectorFieldGrid:
    """The field with ``v_flat = phi1 d phi2 + d f`` for periodic scalar grids."""
    phi1 = np.broadcast_to(np.asarray(phi1, dtype=float), grid.shape)
    form = gradient(phi2, grid) * phi1 + gradient(np.broadcast_to(np.asarray(f, float), grid.shape), grid)
    g = np.ones(grid.dim) if metric is None else np.asarray(metric, dtype=float)
    return VectorFieldGrid(grid, form.data / g.reshape((-1,) + (1,) * grid.dim))


# ---------------------------------------------------------------------------
# Classical Clebsch identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClebschReport:
    """Residuals of ``v_flat - f dg - dh``.

    Attributes:
        interior: Max-norm over nodes at least ``margin`` nodes from the chart boundary.
        full: Max-norm over all nodes of the covering chart (one-sided stencils included).
        seam: Max-norm when the same samples are differentiated as periodic data;
            large values signal potentials that do not descend to the torus.
        margin: Number of excluded boundary layers.
    """

    interior: float
    full: float
    seam: float
    margin: int


def _clebsch_difference(v_flat: DiscreteFormField, f, g, h) -> np.ndarray:
    grid = v_flat.grid
    dg = gradient(g, grid)
    dh = gradient(h, grid)
    return v_flat.data - dg.data * np.asarray(f)[None] - dh.data


def clebsch_report(v: VectorFieldGrid, f: Any, g: Any, h: Any,
                   metric: Sequence[float] | None = None, margin: int = CLEBSCH_MARGIN) -> ClebschReport:
    """Evaluate the classical Clebsch identity on the covering chart of ``v``'s grid."""
    grid = v.grid
    arrays = [np.broadcast_to(np.asarray(a, dtype=float), grid.shape) for a in (f, g, h)]
    flat = v.flat(metric)
    chart = grid.as_chart()
    diff = _clebsch_difference(DiscreteFormField(chart, 1, flat.data), *arrays)
    inner = (slice(None),) + tuple(slice(margin, n - margin) for n in grid.shape)
    interior = float(np.max(np.abs(diff[inner]))) if diff[inner].size else 0.0
    if all(grid.periodic):
        seam = float(np.max(np.abs(_clebsch_difference(flat, *arrays))))
    else:
        seam = float("nan")
    return ClebschReport(interior, float(np.max(np.abs(diff))), seam, margin)


def clebsch_residual(v: VectorFieldGrid, f: Any, g: Any, h: Any,
                     metric: Sequence[float] | None = None, margin: int = CLEBSCH_MARGIN) -> float:
    """Interior max-norm of ``v_flat - f dg - dh`` on the covering chart."""
    return clebsch_report(v, f, g, h, metric, margin).interior


# ---------------------------------------------------------------------------
# Hopf-type fields and the generalized Clebsch identity
# ---------------------------------------------------------------------------


def _smooth_step(t: np.ndarray, order: int) -> np.ndarray:
    """Odd polynomial step: 0 at 0, 1 for ``t >= 1``, ``C^order`` at ``t = 1``."""
    t = np.clip(t, 0.0, 1.0)
    coeffs = [math.comb(order, j) * (-1) ** j / (2 * j + 1) for j in range(order + 1)]
    total = sum(coeffs)
    out = np.zeros_like(t)
    for j, cj in enumerate(coeffs):
        out += cj * t ** (2 * j + 1)
    return out / total


@dataclass(frozen=True)
class HopfField:
    """A map into the 2-sphere with a lift to the 3-sphere and its pulled-back connection.

    Attributes:
        phi: ``S2``-valued section (Hopf projection of the lift).
        lift: ``(*shape, 4)`` lift ``(Re z1, Im z1, Re z2, Im z2)`` on the unit 3-sphere.
        theta: Pull-back of the connection ``Im(z1* dz1 + z2* dz2) / 2 pi``.
    """

    phi: SectionGrid
    lift: np.ndarray
    theta: DiscreteFormField

    def velocity(self) -> VectorFieldGrid:
        """The field with ``v_flat = -phi^* theta`` for the flat unit metric."""
        return VectorFieldGrid(self.theta.grid, -self.theta.data)


def hopf_projection(lift: np.ndarray) -> np.ndarray:
    """``(z1, z2) -> (2 z1 conj(z2), |z1|^2 - |z2|^2)`` as a unit vector in ``R^3``."""
    z1 = lift[..., 0] + 1j * lift[..., 1]
    z2 = lift[..., 2] + 1j * lift[..., 3]
    w = 2 * z1 * np.conj(z2)
    return np.stack([w.real, w.imag, np.abs(z1) ** 2 - np.abs(z2) ** 2], axis=-1)


def connection_pullback(lift: np.ndarray, grid: Grid) -> DiscreteFormField:
    """Pull back ``Im(z1* dz1 + z2* dz2) / 2 pi`` along a sampled map into the 3-sphere."""
    data = np.zeros((grid.dim,) + grid.shape)
    for i in range(grid.dim):
        for re, im in ((0, 1), (2, 3)):
            data[i] += lift[..., re] * partial(lift[..., im], i, grid) \
                - lift[..., im] * partial(lift[..., re], i, grid)
    return DiscreteFormField(grid, 1, data / (2 * math.pi))


def hopf_field(grid: Grid, radius_fraction: float = 0.9, order: int = 8) -> HopfField:
    """Degree-one collapse of the periodic box onto the 3-sphere, composed with the Hopf map.

    A ball of radius ``radius_fraction * min(L)/2`` about the box centre is
    wrapped once around the 3-sphere; its complement goes to a single point.

    Args:
        grid: Periodic 3-dimensional grid.
        radius_fraction: Ball radius relative to the largest inscribed ball.
        order: Smoothness order of the radial profile at the ball boundary.
    """
    if grid.dim != 3:
        raise DimensionMismatch("the Hopf construction needs a 3-dimensional grid")
    pts = grid.points()
    centre = np.asarray(grid.lengths) / 2
    rel = pts - centre
    r = np.linalg.norm(rel, axis=-1)
    radius = radius_fraction * min(grid.lengths) / 2
    angle = math.pi * _smooth_step(r / radius, order)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(r > 0, np.sin(angle) / np.where(r > 0, r, 1.0), math.pi / radius
                         * _smooth_step_slope(order))
    lift = np.concatenate([np.cos(angle)[..., None], scale[..., None] * rel], axis=-1)
    lift /= np.linalg.norm(lift, axis=-1, keepdims=True)
    phi = SectionGrid(grid, hopf_projection(lift), "S2")
    return HopfField(phi, lift, connection_pullback(lift, grid))


def _smooth_step_slope(order: int) -> float:
    coeffs = [math.comb(order, j) * (-1) ** j / (2 * j + 1) for j in range(order + 1)]
    return 1.0 / sum(coeffs)


def pulled_back_area(phi: SectionGrid) -> DiscreteFormField:
    """``phi^*`` of the area form of the unit 2-sphere."""
    grid = phi.grid
    vals = phi.values
    derivs = [np.stack([partial(vals[..., a], i, grid) for a in range(3)], axis=-1)
              for i in range(grid.dim)]
    parts = [np.einsum("...a,...a->...", vals, np.cross(derivs[i], derivs[j]))
             for i, j in multi_indices(grid.dim, 2)]
    return DiscreteFormField(grid, 2, np.stack(parts))


def hopf_curvature_residual(field: HopfField) -> float:
    """Max-norm of ``d theta + phi^* area / 4 pi`` (the curvature identity of the lift)."""
    d_theta = exterior_derivative(field.theta)
    area = pulled_back_area(field.phi)
    return float(np.max(np.abs(d_theta.data + area.data / (4 * math.pi))))


def generalized_clebsch_residual(v: VectorFieldGrid, phi: SectionGrid, theta: DiscreteFormField,
                                 nu: DiscreteFormField | None = None,
                                 metric: Sequence[float] | None = None,
                                 closed_tol: float = 1e-9) -> float:
    """Max-norm of ``v_flat - (-phi^* theta + nu)``.

    Args:
        v: Velocity field.
        phi: ``S2``-valued section (validated on construction).
        theta: Pull-back of the connection along a lift of ``phi`` (a 1-form grid).
        nu: Closed 1-form (default zero).
        metric: Constant diagonal metric used to lower indices.
        closed_tol: Tolerance for ``|d nu|`` relative to ``max(1, |nu|)``.

    Raises:
        NotClosedForm: If ``nu`` is not closed.
        ShapeMismatch: If the fields live on different grids.
    """
    grid = v.grid
    if phi.grid != grid or theta.grid != grid or theta.degree != 1:
        raise ShapeMismatch("velocity, section and connection must share a grid")
    if phi.fiber != "S2":
        raise ShapeMismatch("generalized Clebsch maps take values in the 2-sphere")
    nu_data = np.zeros_like(theta.data)
    if nu is not None:
        if nu.grid != grid or nu.degree != 1:
            raise ShapeMismatch("nu must be a 1-form on the velocity grid")
        d_nu = exterior_derivative(nu).max_norm()
        if d_nu > closed_tol * max(1.0, nu.max_norm()):
            raise NotClosedForm(f"|d nu| = {d_nu:.3e} exceeds the closedness tolerance")
        nu_data = nu.data
    return float(np.max(np.abs(v.flat(metric).data + theta.data - nu_data)))


def harmonic_form(grid: Grid, periods: Sequence[float]) -> DiscreteFormField:
    """The constant closed 1-form with the given periods along the axis loops."""
    periods = np.asarray(periods, dtype=float)
    if periods.shape != (grid.dim,):
        raise ShapeMismatch("one period per axis is required")
    comps = {(i,): periods[i] / grid.lengths[i] for i in range(grid.dim)}
    return DiscreteFormField.from_components(grid, 1, comps)


def helicity_cross_terms(v_flat: DiscreteFormField, nu: DiscreteFormField) -> dict[str, float]:
    """Expansion of ``Hel(v + nu)`` into ``v dv``, ``nu dv``, ``v dnu`` and ``nu dnu`` integrals."""
    dv, dn = exterior_derivative(v_flat), exterior_derivative(nu)
    terms = {
        "v_dv": integrate_top(wedge(v_flat, dv)),
        "nu_dv": integrate_top(wedge(nu, dv)),
        "v_dnu": integrate_top(wedge(v_flat, dn)),
        "nu_dnu": integrate_top(wedge(nu, dn)),
    }
    return {k: float(val) for k, val in terms.items()}


# ---------------------------------------------------------------------------
# Liouville numbers
# ---------------------------------------------------------------------------


def _uniform(ts: np.ndarray) -> bool:
    steps = np.diff(ts)
    return bool(np.max(np.abs(steps - steps.mean())) <= 1e-12)


def _loop_integral(loop: LoopPath, theta: Callable[[np.ndarray], Any], method: str) -> float:
    pts = loop.points
    if method == "auto":
        method = "spectral" if _uniform(loop.ts) else "polyline"
    if method == "spectral":
        if not _uniform(loop.ts):
            raise ShapeMismatch("spectral loop quadrature needs uniformly spaced parameters")
        n = len(loop.ts) - 1
        t = loop.ts[:-1]
        periodic = pts[:-1] - np.outer(t, loop.winding)
        k = np.fft.fftfreq(n, d=1.0 / n) * 2 * math.pi
        if n % 2 == 0:
            k[n // 2] = 0.0
        vel = np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(periodic, axis=0), axis=0)) + loop.winding
        vals = [float(np.dot(np.asarray(theta(p), dtype=float), dv)) for p, dv in zip(pts[:-1], vel)]
        return float(np.mean(vals))
    if method == "polyline":
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            total += float(np.dot(np.asarray(theta(0.5 * (a + b)), dtype=float), b - a))
        return total
    raise ValueError(f"unknown quadrature method {method!r}")


def liouville_class(loops: LoopPath | Sequence[LoopPath], theta: Callable[[np.ndarray], Any],
                    method: str = "auto") -> Any:
    """Line integrals ``int_gamma iota^* theta`` over generator loops.

    Args:
        loops: One loop or a sequence of loops lying in the submanifold.
        theta: Primitive 1-form ``point -> covector`` with ``d theta = omega``.
        method: ``"spectral"`` (uniform smooth parametrizations), ``"polyline"``
            (midpoint rule on chords) or ``"auto"``.

    Returns:
        A float for a single loop, otherwise an array with one value per loop.
    """
    if isinstance(loops, LoopPath):
        return _loop_integral(loops, theta, method)
    return np.array([_loop_integral(lp, theta, method) for lp in loops])
