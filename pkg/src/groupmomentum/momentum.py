"""Finite-dimensional symplectic G-systems and momentum-map verification.

A :class:`SymplecticSample` bundles a point in a chart of a symplectic
manifold with the chart expression of the symplectic form, an action, its
infinitesimal generators and a candidate momentum map with values in a dual
group ``G*``.  The functions in this module measure how well the candidate
satisfies the defining relation

    ``omega(A*, X) + kappa(A, deltaJ(X)) = 0``,

where ``deltaJ`` is the left logarithmic derivative of ``J``; they also
integrate Hamiltonian flows with the implicit midpoint rule to observe
Noether conservation and evaluate the non-equivariance cocycle.

Convention: ``omega(X, Y) = X^T W Y`` for the chart matrix ``W`` and the
Hamiltonian vector field of ``h`` is the solution of ``omega(X_h, .) = -dh``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    AdjointMismatch,
    ChartBoundary,
    ConstraintViolation,
    IntegratorDiverged,
    PreconditionFailed,
)
from .lie_core import DualPairing, VectorGroupModel, entries, log_derivative

OMEGA_TOL = 1e-12


def _as_point(x: Any) -> np.ndarray:
    return np.array(x, dtype=float).reshape(-1)


@dataclass(frozen=True)
class SymplecticSample:
    """A point of a symplectic G-manifold together with its chart data.

    Attributes:
        point: Chart coordinates of the point.
        omega: Either a constant antisymmetric matrix or a callable returning
            the matrix of the symplectic form at a chart point.
        action: ``(g, point) -> point``.
        inf_action: ``(A, point) -> A*`` in chart components.
        momentum: ``point -> J(point)`` with values in the dual group.
        group: Group model of the acting group ``G``.
        dual_group: Group model of the dual group ``G*``.
        name: Label used in reports.
    """

    point: np.ndarray
    omega: Any
    action: Callable[[Any, np.ndarray], np.ndarray]
    inf_action: Callable[[Any, np.ndarray], np.ndarray]
    momentum: Callable[[np.ndarray], Any]
    group: Any
    dual_group: Any
    name: str = ""
    omega_condition: float = field(init=False, default=np.nan)

    def __post_init__(self) -> None:
        object.__setattr__(self, "point", _as_point(self.point))
        w = self.omega_at(self.point)
        n = self.point.size
        if w.shape != (n, n):
            raise ConstraintViolation(f"omega has shape {w.shape}, expected {(n, n)}")
        if np.max(np.abs(w + w.T)) > OMEGA_TOL * max(1.0, np.max(np.abs(w))):
            raise ConstraintViolation("omega is not antisymmetric")
        cond = float(np.linalg.cond(w))
        if not cond < 1e12:
            raise ConstraintViolation("omega is degenerate")
        object.__setattr__(self, "omega_condition", cond)

    @property
    def dim(self) -> int:
        return int(self.point.size)

    def omega_at(self, point: Any) -> np.ndarray:
        if callable(self.omega):
            return np.asarray(self.omega(_as_point(point)), dtype=float)
        return np.asarray(self.omega, dtype=float)

    @property
    def omega_matrix(self) -> np.ndarray:
        return self.omega_at(self.point)

    def at(self, point: Any) -> "SymplecticSample":
        """The same system sampled at another chart point."""
        return replace(self, point=_as_point(point))

    def generator(self, a: Any, point: Any = None) -> np.ndarray:
        p = self.point if point is None else _as_point(point)
        return _as_point(self.inf_action(a, p))

    def inf_action_residual(self, a: Any, step: float = 1e-5) -> float:
        """Compare ``inf_action`` with a central difference of ``action(exp(tA))``."""
        plus = _as_point(self.action(self.group.exp(step * np.asarray(entries(a))), self.point))
        minus = _as_point(self.action(self.group.exp(-step * np.asarray(entries(a))), self.point))
        fd = (plus - minus) / (2 * step)
        return float(np.max(np.abs(fd - self.generator(a))))


def _momentum_values(sys: SymplecticSample, direction: np.ndarray, fd_step: float):
    def curve(t: float):
        value = sys.momentum(sys.point + t * direction)
        arr = np.asarray(entries(value))
        if not np.all(np.isfinite(arr)):
            raise ChartBoundary("momentum evaluator returned non-finite values")
        return value
    return curve


def differential(sys: SymplecticSample, direction: Any, fd_step: float = 1e-5):
    """Left logarithmic derivative of the momentum along a chart direction."""
    direction = _as_point(direction)
    curve = _momentum_values(sys, direction, fd_step)
    try:
        return log_derivative(curve, 0.0, step=fd_step, group=sys.dual_group, order=2)
    except ChartBoundary:
        raise
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise ChartBoundary(f"momentum evaluation failed near the point: {exc}") from exc


def momentum_residual(sys: SymplecticSample, a: Any, pairing: DualPairing,
                      fd_step: float = 1e-5) -> float:
    """Max over chart directions ``X`` of ``|omega(A*, X) + kappa(A, deltaJ(X))|``."""
    w = sys.omega_matrix
    gen = sys.generator(a)
    worst = 0.0
    for k in range(sys.dim):
        x = np.zeros(sys.dim)
        x[k] = 1.0
        dj = differential(sys, x, fd_step)
        value = gen @ w @ x + pairing(entries(a), entries(dj))
        worst = max(worst, abs(float(value)))
    return worst


def momentum_residual_basis(sys: SymplecticSample, pairing: DualPairing,
                            fd_step: float = 1e-5, basis: Sequence[Any] | None = None) -> float:
    """:func:`momentum_residual` maximised over a basis of the acting algebra."""
    basis = pairing.basis_left if basis is None else basis
    return max((momentum_residual(sys, a, pairing, fd_step) for a in basis), default=0.0)


def circle_momentum_residual(sys: SymplecticSample, fd_step: float = 1e-5) -> float:
    """Residual of ``1* -| omega + deltaJ = 0`` for circle-valued ``J`` (angles mod 1)."""
    w = sys.omega_matrix
    gen = sys.generator(np.array([1.0]))
    worst = 0.0
    for k in range(sys.dim):
        x = np.zeros(sys.dim)
        x[k] = 1.0
        plus = np.atleast_1d(sys.momentum(sys.point + fd_step * x)).astype(float)
        minus = np.atleast_1d(sys.momentum(sys.point - fd_step * x)).astype(float)
        delta = plus - minus
        delta = delta - np.floor(delta + 0.5)
        dj = float(delta[0]) / (2 * fd_step)
        worst = max(worst, abs(float(gen @ w @ x) + dj))
    return worst


# ---------------------------------------------------------------------------
# Noether conservation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Hamiltonian:
    """A Hamiltonian function with an optional exact gradient."""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-6

    def __call__(self, z: np.ndarray) -> float:
        return float(self.value(z))

    def grad(self, z: np.ndarray) -> np.ndarray:
        if self.gradient is not None:
            return _as_point(self.gradient(z))
        g = np.empty(z.size)
        for k in range(z.size):
            e = np.zeros(z.size)
            e[k] = self.fd_step
            g[k] = (self.value(z + e) - self.value(z - e)) / (2 * self.fd_step)
        return g


def hamiltonian_vector_field(sys: SymplecticSample, ham: Hamiltonian, z: np.ndarray) -> np.ndarray:
    """Solve ``omega(X_h, .) = -dh`` in chart coordinates."""
    w = sys.omega_at(z)
    return np.linalg.solve(w.T, -ham.grad(z))


def implicit_midpoint_step(sys: SymplecticSample, ham: Hamiltonian, z: np.ndarray, dt: float,
                           tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """One implicit midpoint step solved by fixed-point iteration."""
    z_new = z + dt * hamiltonian_vector_field(sys, ham, z)
    for _ in range(max_iter):
        mid = 0.5 * (z + z_new)
        candidate = z + dt * hamiltonian_vector_field(sys, ham, mid)
        change = np.max(np.abs(candidate - z_new))
        z_new = candidate
        if not np.all(np.isfinite(z_new)):
            break
        if change <= tol * max(1.0, np.max(np.abs(z_new))):
            return z_new
    raise IntegratorDiverged(f"fixed-point iteration did not converge (dt = {dt})")


@dataclass(frozen=True)
class NoetherReport:
    drift: float
    invariance_residual: float
    steps: int
    final_point: np.ndarray


def invariance_residual(sys: SymplecticSample, ham: Hamiltonian, basis: Sequence[Any],
                        points: Sequence[np.ndarray] | None = None) -> float:
    """Max of ``|dh(A*)|`` over a basis of generators and sample points."""
    points = [sys.point] if points is None else points
    worst = 0.0
    for p in points:
        g = ham.grad(_as_point(p))
        for a in basis:
            worst = max(worst, abs(float(g @ sys.generator(a, p))))
    return worst


def noether_report(sys: SymplecticSample, ham: Hamiltonian | Callable, t_end: float, dt: float,
                   basis: Sequence[Any] = (), record_every: int = 1) -> NoetherReport:
    """Integrate Hamilton's equations and record the momentum drift.

    The drift is ``max_t dist(J(z(t)), J(z(0)))`` measured with the dual group's
    distance (log-distance for matrix groups, vector norm for vector spaces,
    shortest angle for tori).
    """
    if not isinstance(ham, Hamiltonian):
        ham = Hamiltonian(ham)
    steps = int(round(t_end / dt))
    z = sys.point.copy()
    j0 = sys.momentum(z)
    drift = 0.0
    inv = invariance_residual(sys, ham, basis) if basis else float("nan")
    for k in range(1, steps + 1):
        z = implicit_midpoint_step(sys, ham, z, dt)
        if k % record_every == 0 or k == steps:
            drift = max(drift, sys.dual_group.distance(j0, sys.momentum(z)))
    return NoetherReport(float(drift), float(inv), steps, z)


def noether_drift(sys: SymplecticSample, hamiltonian: Hamiltonian | Callable, t_end: float,
                  dt: float) -> float:
    """Maximal distance of ``J(z(t))`` from ``J(z(0))`` along the midpoint flow."""
    return noether_report(sys, hamiltonian, t_end, dt).drift


# ---------------------------------------------------------------------------
# Cocycles and Poisson maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CocycleValue:
    """Values ``sigma_m(A_i, A_j) = omega_m(A_i*, A_j*)`` over a basis."""

    bilinear_matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.bilinear_matrix, dtype=float)
        if np.max(np.abs(m + m.T), initial=0.0) > 1e-10:
            raise ConstraintViolation("cocycle matrix is not antisymmetric")
        m.setflags(write=False)
        object.__setattr__(self, "bilinear_matrix", m)


def nonequivariance_cocycle(sys: SymplecticSample, basis: Sequence[Any]) -> CocycleValue:
    """``sigma_m(A, B) = omega_m(A*, B*)``, antisymmetric by construction."""
    w = sys.omega_matrix
    gens = [sys.generator(a) for a in basis]
    n = len(gens)
    sigma = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        sigma[i, j] = gens[i] @ w @ gens[j]
        sigma[j, i] = -sigma[i, j]
    return CocycleValue(sigma)


def cocycle_identity_residual(sys: SymplecticSample, basis: Sequence[Any],
                              bracket: Callable[[Any, Any], Any]) -> float:
    """Max over triples of ``|sigma([A,B],C) + sigma([B,C],A) + sigma([C,A],B)|``."""
    w = sys.omega_matrix

    def sigma(x, y):
        return float(sys.generator(x) @ w @ sys.generator(y))

    worst = 0.0
    for a, b, c in itertools.combinations(basis, 3):
        total = (sigma(bracket(a, b), c) + sigma(bracket(b, c), a) + sigma(bracket(c, a), b))
        worst = max(worst, abs(total))
    return worst


def poisson_map_residual(sys: SymplecticSample, pi_dual: Any, basis: Sequence[Any],
                         pairing: DualPairing) -> float:
    """Max over basis pairs of ``|omega(A*, B*) - kappa(A, pi(J(m), B))|``.

    ``pi_dual`` is either a callable ``(eta, A) -> value`` or an object with a
    ``pi`` attribute of that form (e.g. a Poisson-Lie structure).
    """
    pi = getattr(pi_dual, "pi", pi_dual)
    w = sys.omega_matrix
    eta = sys.momentum(sys.point)
    worst = 0.0
    for a in basis:
        for b in basis:
            lhs = sys.generator(a) @ w @ sys.generator(b)
            rhs = pairing(entries(a), entries(pi(eta, entries(b))))
            worst = max(worst, abs(float(lhs - rhs)))
    return worst


# ---------------------------------------------------------------------------
# Extensions, lifts and subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentumComponent:
    """One summand of a momentum map for a direct-sum pairing.

    Attributes:
        momentum: ``point -> value`` in the component's dual group.
        pairing: Pairing of the component algebra with its dual.
        embed: Linear map from the component algebra into the acting algebra.
        dual_group: Group model of the component's dual group.
    """

    momentum: Callable[[np.ndarray], Any]
    pairing: DualPairing
    embed: Callable[[Any], Any]
    dual_group: Any


def component_residual(sys: SymplecticSample, comp: MomentumComponent,
                       fd_step: float = 1e-5) -> float:
    """Residual of ``embed(A)* -| omega + kappa(A, deltaJ) = 0`` over the component basis."""
    sub = replace(sys, inf_action=lambda a, p: sys.inf_action(comp.embed(a), p),
                  momentum=comp.momentum, dual_group=comp.dual_group)
    return momentum_residual_basis(sub, comp.pairing, fd_step)


@dataclass(frozen=True)
class ExtensionMomentum:
    """The pair ``(J_H, J_sigma)`` as a momentum map for the extension ``K``."""

    parts: tuple[MomentumComponent, ...]
    part_residuals: tuple[float, ...]

    def __call__(self, point: Any) -> tuple:
        return tuple(c.momentum(_as_point(point)) for c in self.parts)

    def residual(self, sys: SymplecticSample, coefficients: Sequence[Any],
                 fd_step: float = 1e-5) -> float:
        """Residual for ``A = sum_i embed_i(A_i)`` against the direct-sum pairing."""
        w = sys.omega_matrix
        gen = sum(sys.generator(c.embed(a)) for c, a in zip(self.parts, coefficients))
        worst = 0.0
        for k in range(sys.dim):
            x = np.zeros(sys.dim)
            x[k] = 1.0
            total = float(gen @ w @ x)
            for comp, a in zip(self.parts, coefficients):
                sub = replace(sys, momentum=comp.momentum, dual_group=comp.dual_group)
                total += comp.pairing(entries(a), entries(differential(sub, x, fd_step)))
            worst = max(worst, abs(total))
        return worst

    def basis_residual(self, sys: SymplecticSample, fd_step: float = 1e-5) -> float:
        worst = 0.0
        zero = [np.zeros_like(c.pairing.basis_left[0]) for c in self.parts]
        for i, comp in enumerate(self.parts):
            for b in comp.pairing.basis_left:
                coeffs = list(zero)
                coeffs[i] = b
                worst = max(worst, self.residual(sys, coeffs, fd_step))
        return worst


def extension_momentum(sys: SymplecticSample, j_h: MomentumComponent,
                       j_sigma: MomentumComponent, fd_step: float = 1e-5,
                       points: Sequence[Any] | None = None) -> ExtensionMomentum:
    """Combine an ``H``-momentum map and a splitting momentum into a ``K``-momentum map.

    Raises:
        PreconditionFailed: if either input violates its own relation by more
            than 1e-5 at any of the sample points.
    """
    points = [sys.point] if points is None else [_as_point(p) for p in points]
    residuals = []
    for comp in (j_h, j_sigma):
        r = max(component_residual(sys.at(p), comp, fd_step) for p in points)
        if r > 1e-5:
            raise PreconditionFailed(f"component residual {r:.3e} exceeds 1e-5")
        residuals.append(r)
    return ExtensionMomentum((j_h, j_sigma), tuple(residuals))


def dual_map(linear: Callable[[Any], Any], source: DualPairing, target: DualPairing
             ) -> Callable[[Any], np.ndarray]:
    """Pairing-adjoint ``L*`` of ``L: source algebra -> target algebra``.

    ``kappa_source(B, L* xi) = kappa_target(L B, xi)`` for all basis ``B``.
    """
    def adjoint(xi: Any) -> np.ndarray:
        values = [target(linear(b), entries(xi)) for b in source.basis_left]
        return source.solve_right(values)
    return adjoint


def lift_momentum(j_sigma: Callable, j_h: Callable, tau_dual: Callable, dual_group: Any
                  ) -> Callable[[np.ndarray], Any]:
    """``J_chi = J_sigma * exp(tau* J_H)`` for an abelian dual group."""
    def j_chi(point: np.ndarray):
        return dual_group.mul(j_sigma(point), dual_group.exp(tau_dual(j_h(point))))
    return j_chi


def subgroup_momentum(j: Callable[[np.ndarray], Any], rho: Callable[[Any], Any],
                      iota: Callable[[Any], Any], g_pairing: DualPairing,
                      h_pairing: DualPairing, rho_algebra: Callable[[Any], Any] | None = None,
                      tol: float = 1e-10) -> Callable[[np.ndarray], Any]:
    """Momentum map ``rho o J`` for the action of a subgroup through ``iota``.

    Raises:
        AdjointMismatch: if the algebra map of ``rho`` is not the adjoint of
            ``iota`` on the stored bases.
    """
    rho_alg = rho if rho_algebra is None else rho_algebra
    for b in h_pairing.basis_left:
        for mu in g_pairing.basis_right:
            lhs = h_pairing(b, entries(rho_alg(mu)))
            rhs = g_pairing(iota(b), mu)
            if abs(lhs - rhs) > tol:
                raise AdjointMismatch(f"rho is not the adjoint of iota ({abs(lhs - rhs):.3e})")

    def j_h(point: np.ndarray):
        return rho(j(point))
    return j_h


def default_dual_group(value: Any) -> Any:
    return VectorGroupModel(np.shape(entries(value)))
