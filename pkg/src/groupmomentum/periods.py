"""Primitive forms, the Maurer-Cartan condition and period homomorphisms.

Given a symplectic ``G``-system and a pairing ``kappa(g, g*)``, the primitive
``g*``-valued 1-form ``alpha`` is defined pointwise by
``kappa(A, alpha_m(X)) = omega_m(X, A*_m)``.  A group-valued momentum map
with ``delta J = alpha`` exists exactly when the periods of ``alpha`` are
trivial: for each loop ``gamma`` the solution of
``eta' = eta (gamma^* alpha)``, ``eta(0) = e``, must return to the identity.

Loops are sampled in covering-space coordinates of a torus chart; a loop
that winds around the torus closes up to its integer ``winding`` vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import NoSolution, PreconditionFailed, StepTooLarge
from .lie_core import DualPairing, TorusGroupModel, entries
from .momentum import SymplecticSample

REPROJECT_EVERY = 100
REPROJECT_TOL = 1e-6


# ---------------------------------------------------------------------------
# Primitive forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimitiveForm:
    """A ``g*``-valued 1-form on a chart of ``M``.

    Attributes:
        alpha: ``(point, tangent) -> value`` in ``g*`` (linear in ``tangent``).
        dim: Chart dimension of ``M``.
        dual_group: Group model of ``G*``.
        pairing: Pairing used to build the form (optional).
        system: Source system (optional).
    """

    alpha: Callable[[np.ndarray, np.ndarray], Any]
    dim: int
    dual_group: Any
    pairing: DualPairing | None = None
    system: SymplecticSample | None = None

    def __call__(self, point: Any, tangent: Any) -> np.ndarray:
        return np.asarray(entries(self.alpha(np.asarray(point, dtype=float),
                                             np.asarray(tangent, dtype=float))))

    def components(self, point: Any) -> list[np.ndarray]:
        """``alpha(e_i)`` for the coordinate directions of the chart."""
        return [self(point, e) for e in np.eye(self.dim)]

    def defining_residual(self, point: Any = None, basis: Sequence[Any] | None = None) -> float:
        """``max |kappa(A, alpha(X)) - omega(X, A*)|`` over basis pairs."""
        if self.system is None or self.pairing is None:
            raise PreconditionFailed("the form was not built from a system")
        sys = self.system
        point = sys.point if point is None else np.asarray(point, dtype=float)
        w = sys.omega_at(point)
        basis = self.pairing.basis_left if basis is None else basis
        worst = 0.0
        for x in np.eye(self.dim):
            val = self(point, x)
            for a in basis:
                lhs = self.pairing(a, val)
                rhs = float(x @ w @ sys.generator(a, point))
                worst = max(worst, abs(lhs - rhs))
        return worst


def build_primitive(sys: SymplecticSample, pairing: DualPairing,
                    check_points: int = 3, tol: float = 1e-10,
                    rng: np.random.Generator | None = None) -> PrimitiveForm:
    """Solve ``kappa(A, alpha_m(X)) = omega_m(X, A*_m)`` through the Gram matrix.

    Raises:
        SingularPairing: if the pairing Gram matrix is singular (at pairing construction).
        NoSolution: if the relation cannot hold for all ``A`` (the fundamental
            vector fields depend non-linearly on ``A``), checked on random
            combinations at a few points.
    """
    basis = pairing.basis_left
    gram_inv = np.linalg.inv(pairing.gram)
    right = np.stack([np.asarray(b) for b in pairing.basis_right])
    shape = right.shape[1:]
    right = right.reshape(len(right), -1)

    def alpha(point, tangent):
        w = sys.omega_at(point)
        values = np.array([tangent @ w @ sys.generator(a, point) for a in basis], dtype=float)
        return ((gram_inv @ values) @ right).reshape(shape)

    prim = PrimitiveForm(alpha, sys.dim, sys.dual_group, pairing, sys)
    rng = rng or np.random.default_rng(0)
    for k in range(check_points):
        point = sys.point + (0.0 if k == 0 else 0.1 * rng.normal(size=sys.dim))
        w = sys.omega_at(point)
        for _ in range(3):
            c = rng.normal(size=pairing.dim)
            a = pairing.left_from_coords(c)
            x = rng.normal(size=sys.dim)
            lhs = pairing(a, prim(point, x))
            rhs = float(x @ w @ sys.generator(a, point))
            if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                raise NoSolution(f"defining relation inconsistent: residual {abs(lhs - rhs):.3e}")
    return prim


def _bracket(model: Any, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if getattr(model, "abelian", False) or model is None:
        return np.zeros_like(x)
    return model.bracket(x, y)


def maurer_cartan_residual(prim: PrimitiveForm, points: Sequence[Any], bracket: Any = None,
                           step: float = 1e-5) -> float:
    """Max of ``|d alpha(e_i, e_j) + [alpha(e_i), alpha(e_j)]|`` over points and pairs.

    ``d alpha(e_i, e_j) = d_i alpha(e_j) - d_j alpha(e_i)`` by central differences;
    ``bracket`` is a group model (or ``None`` for the dual group of ``prim``).
    """
    model = prim.dual_group if bracket is None else bracket
    worst = 0.0
    eye = np.eye(prim.dim)
    for p in points:
        p = np.asarray(p, dtype=float)
        comps = prim.components(p)
        deriv = []
        for i in range(prim.dim):
            plus = prim.components(p + step * eye[i])
            minus = prim.components(p - step * eye[i])
            deriv.append([(u - v) / (2 * step) for u, v in zip(plus, minus)])
        for i in range(prim.dim):
            for j in range(i + 1, prim.dim):
                val = deriv[i][j] - deriv[j][i] + _bracket(model, comps[i], comps[j])
                worst = max(worst, float(np.max(np.abs(val))))
    return worst


# ---------------------------------------------------------------------------
# Loops
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopPath:
    """A piecewise-linear closed curve in a covering chart.

    Attributes:
        ts: Strictly increasing parameters from 0 to 1.
        points: ``(len(ts), dim)`` array of chart points.
        winding: Covering displacement ``points[-1] - points[0]`` (lattice vector).
        closed: Always ``True`` after validation.
    """

    ts: np.ndarray
    points: np.ndarray
    winding: np.ndarray = field(default=None)
    closed: bool = True

    def __post_init__(self) -> None:
        ts = np.asarray(self.ts, dtype=float)
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if ts.ndim != 1 or len(ts) != len(pts) or len(ts) < 2:
            raise PreconditionFailed("a loop needs at least two samples with matching parameters")
        if np.any(np.diff(ts) <= 0):
            raise PreconditionFailed("loop parameters must be strictly increasing")
        wind = np.zeros(pts.shape[1]) if self.winding is None else np.asarray(self.winding, float)
        gap = pts[-1] - pts[0] - wind
        if np.max(np.abs(gap)) > 1e-12 * max(1.0, float(np.max(np.abs(pts)))):
            raise PreconditionFailed(f"loop is not closed: gap {np.max(np.abs(gap)):.3e}")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "winding", wind)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_function(cls, curve: Callable[[float], Any], samples: int = 2000,
                      winding: Any = None) -> "LoopPath":
        ts = np.linspace(0.0, 1.0, samples + 1)
        pts = np.array([np.asarray(curve(t), dtype=float) for t in ts])
        if winding is not None:
            pts[-1] = pts[0] + np.asarray(winding, dtype=float)
        else:
            pts[-1] = pts[0]
        return cls(ts, pts, winding)

    @classmethod
    def straight(cls, base: Any, winding: Any, samples: int = 2000) -> "LoopPath":
        """The generator loop ``t -> base + t * winding``."""
        base = np.asarray(base, dtype=float)
        wind = np.asarray(winding, dtype=float)
        return cls.from_function(lambda t: base + t * wind, samples, wind)

    @classmethod
    def constant(cls, base: Any, samples: int = 10) -> "LoopPath":
        base = np.asarray(base, dtype=float)
        return cls(np.linspace(0.0, 1.0, samples + 1), np.tile(base, (samples + 1, 1)))

    def concat(self, other: "LoopPath") -> "LoopPath":
        """Run ``self`` then ``other`` (translated to start where ``self`` ends)."""
        shift = self.points[-1] - other.points[0]
        ts = np.concatenate([0.5 * self.ts, 0.5 + 0.5 * other.ts[1:]])
        pts = np.vstack([self.points, other.points[1:] + shift])
        return LoopPath(ts, pts, self.winding + other.winding)

    def reparametrize(self, phi: Callable[[np.ndarray], np.ndarray]) -> "LoopPath":
        """Same points at new parameters ``phi(t)`` (monotone with fixed ends)."""
        return LoopPath(np.asarray(phi(self.ts), dtype=float), self.points, self.winding)

    def resample(self, phi: Callable[[np.ndarray], np.ndarray], samples: int) -> "LoopPath":
        """Resample the same geometric curve at parameters ``phi(s)`` for uniform ``s``."""
        s = np.linspace(0.0, 1.0, samples + 1)
        t = np.clip(np.asarray(phi(s), dtype=float), 0.0, 1.0)
        pts = np.column_stack([np.interp(t, self.ts, self.points[:, k]) for k in range(self.dim)])
        pts[-1] = pts[0] + self.winding
        return LoopPath(s, pts, self.winding)


# ---------------------------------------------------------------------------
# Periods
# ---------------------------------------------------------------------------


def _is_abelian(model: Any) -> bool:
    return bool(getattr(model, "abelian", False))


def _quadrature(prim: PrimitiveForm, loop: LoopPath) -> np.ndarray:
    total = None
    for k in range(len(loop.ts) - 1):
        mid = 0.5 * (loop.points[k] + loop.points[k + 1])
        val = prim(mid, loop.points[k + 1] - loop.points[k])
        total = val if total is None else total + val
    return total


def _rk4(prim: PrimitiveForm, loop: LoopPath, dt: float, model: Any) -> np.ndarray:
    abelian = _is_abelian(model)
    eta = np.array(model.identity(), dtype=complex if not abelian and
                   getattr(model, "complex", False) else float)
    steps = 0
    for k in range(len(loop.ts) - 1):
        t0, t1 = loop.ts[k], loop.ts[k + 1]
        p0, p1 = loop.points[k], loop.points[k + 1]
        velocity = (p1 - p0) / (t1 - t0)
        n_sub = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
        h = (t1 - t0) / n_sub

        def a(t):
            return prim(p0 + (t - t0) * velocity, velocity)

        a_next = a(t0)
        for j in range(n_sub):
            t = t0 + j * h
            a0, a1, a2 = a_next, a(t + 0.5 * h), a(t + h)
            a_next = a2
            if abelian:
                eta = eta + h * (a0 + 4 * a1 + a2) / 6.0
            else:
                k1 = eta @ a0
                k2 = (eta + 0.5 * h * k1) @ a1
                k3 = (eta + 0.5 * h * k2) @ a1
                k4 = (eta + h * k3) @ a2
                eta = eta + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
                steps += 1
                if steps % REPROJECT_EVERY == 0:
                    eta, correction = model.project(eta)
                    if correction > REPROJECT_TOL:
                        raise StepTooLarge(f"re-projection moved eta by {correction:.3e}")
    return eta


def period_homomorphism(prim: PrimitiveForm, loop: LoopPath, dual_group: Any = None,
                        dt: float = 1e-3, method: str = "auto") -> np.ndarray:
    """``eta(1)`` for ``eta' = eta (gamma^* alpha)``, ``eta(0) = e``.

    Args:
        prim: The primitive form.
        loop: Closed loop in the chart.
        dual_group: Group model of ``G*`` (defaults to the form's).
        dt: Maximal RK4 step; steps are aligned with the loop samples.
        method: ``"quadrature"`` (abelian groups, midpoint rule per segment),
            ``"rk4"``, or ``"auto"`` (quadrature for abelian groups).

    Raises:
        StepTooLarge: if a periodic re-projection corrects more than 1e-6.
    """
    model = prim.dual_group if dual_group is None else dual_group
    if method == "auto":
        method = "quadrature" if _is_abelian(model) else "rk4"
    if method == "quadrature":
        if not _is_abelian(model):
            raise PreconditionFailed("plain quadrature needs an abelian dual group")
        value = _quadrature(prim, loop)
    elif method == "rk4":
        value = _rk4(prim, loop, dt, model)
    else:
        raise ValueError(f"unknown method {method!r}")
    if isinstance(model, TorusGroupModel):
        value = model.wrap(value)
    return value


def distance_to_identity(model: Any, value: Any) -> float:
    """Distance of a period from the identity (mod lattice for tori)."""
    value = np.asarray(entries(value))
    if isinstance(model, TorusGroupModel):
        coords = model.lattice_coordinates(value)
        return float(np.max(np.abs(coords - np.round(coords)))) if coords.size else 0.0
    if _is_abelian(model):
        return float(np.max(np.abs(value))) if value.size else 0.0
    return float(np.linalg.norm(value - model.identity()))


@dataclass(frozen=True)
class ExistenceVerdict:
    """Outcome of the period test.

    Attributes:
        verdict: ``"EXISTS"`` or ``"OBSTRUCTED"``.
        periods: Period of each generator.
        distances: Distance of each period from the identity.
        offending: Indices of generators with non-trivial periods.
    """

    verdict: str
    periods: list
    distances: list
    offending: list

    @property
    def exists(self) -> bool:
        return self.verdict == "EXISTS"

    def as_dict(self) -> dict:
        return {"verdict": self.verdict,
                "periods": [np.real_if_close(np.asarray(p)).tolist() for p in self.periods],
                "distances": [float(d) for d in self.distances],
                "offending": list(self.offending)}


def existence_verdict(prim: PrimitiveForm, generators: Sequence[LoopPath], dual_group: Any = None,
                      tol: float = 1e-6, dt: float = 1e-3, method: str = "auto",
                      periods: Sequence[Any] | None = None) -> ExistenceVerdict:
    """``EXISTS`` iff every generator has trivial period (within ``tol``).

    Args:
        periods: Already computed periods, one per generator, valued in
            ``dual_group`` (e.g. images of periods computed in a covering
            group).  When given, no loop is integrated.
    """
    model = prim.dual_group if dual_group is None else dual_group
    if periods is not None and len(periods) != len(generators):
        raise ValueError(f"expected {len(generators)} periods, got {len(periods)}")
    given = periods
    periods, dists, bad = [], [], []
    for i, loop in enumerate(generators):
        if given is None:
            per = period_homomorphism(prim, loop, model, dt, method)
        else:
            per = model.wrap(given[i]) if isinstance(model, TorusGroupModel) else np.asarray(given[i])
        d = distance_to_identity(model, per)
        periods.append(per)
        dists.append(d)
        if d > tol:
            bad.append(i)
    return ExistenceVerdict("OBSTRUCTED" if bad else "EXISTS", periods, dists, bad)


def torus_generators(base: Any, dim: int | None = None, windings: Sequence[Any] | None = None,
                     samples: int = 2000) -> list[LoopPath]:
    """Straight generator loops of a torus chart (unit windings by default)."""
    base = np.asarray(base, dtype=float)
    dim = len(base) if dim is None else dim
    windings = list(np.eye(dim)) if windings is None else windings
    return [LoopPath.straight(base, w, samples) for w in windings]


def integrate_momentum(prim: PrimitiveForm, base_point: Any, point: Any, dual_group: Any = None,
                       samples: int = 50, dt: float = 1e-2) -> np.ndarray:
    """``eta(1)`` along the straight path from ``base_point`` to ``point``.

    When all periods are trivial this defines a momentum map with ``J(base) = e``.
    """
    model = prim.dual_group if dual_group is None else dual_group
    base = np.asarray(base_point, dtype=float)
    end = np.asarray(point, dtype=float)
    ts = np.linspace(0.0, 1.0, samples + 1)
    pts = base[None, :] + ts[:, None] * (end - base)[None, :]
    abelian = _is_abelian(model)
    path = _OpenPath(ts, pts)
    value = _quadrature(prim, path) if abelian else _rk4(prim, path, dt, model)
    if isinstance(model, TorusGroupModel):
        value = model.wrap(value)
    return value


@dataclass(frozen=True)
class _OpenPath:
    ts: np.ndarray
    points: np.ndarray


def momentum_from_primitive(prim: PrimitiveForm, base_point: Any, dual_group: Any = None,
                            samples: int = 50) -> Callable[[np.ndarray], np.ndarray]:
    """Candidate momentum map ``m -> integrate_momentum(prim, base_point, m)``."""
    def j(point):
        return integrate_momentum(prim, base_point, point, dual_group, samples)
    return j


__all__ = [
    "PrimitiveForm", "build_primitive", "maurer_cartan_residual", "LoopPath",
    "period_homomorphism", "distance_to_identity", "ExistenceVerdict", "existence_verdict",
    "torus_generators", "integrate_momentum", "momentum_from_primitive",
]
