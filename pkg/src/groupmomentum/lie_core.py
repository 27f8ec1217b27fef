"""Matrix Lie group and Lie algebra arithmetic.

The module provides tagged matrix elements, exponential and logarithm,
adjoint and coadjoint actions relative to an explicit bilinear pairing, and
left logarithmic derivatives of group-valued curves.

Conventions used throughout the package:

* ``Ad_g A = g A g^{-1}`` and ``[A, B] = AB - BA``.
* For a pairing ``kappa(A, mu)`` between an algebra (left) and its dual
  (right), ``Coad_g mu`` is the unique element with
  ``kappa(A, Coad_g mu) = kappa(Ad_g A, mu)`` for all ``A``, and
  ``coad_A mu`` the unique element with
  ``kappa(B, coad_A mu) = kappa([A, B], mu)``.  With these definitions
  ``g -> Coad_g`` is a *right* action; ``Coad_{g^{-1}}`` is the left
  coadjoint action.
* The left logarithmic derivative of a curve ``g(t)`` is ``g^{-1} g'(t)``.

Besides matrix groups, three abelian "group models" are provided (vector
spaces, tori ``R^n / lattice`` and the circle) so that dual groups such as
``g*`` viewed as an additive group, or ``U(1)`` written as angles mod 1,
share one interface with matrix groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ConstraintViolation,
    InsufficientSamples,
    OutOfInjectivityRadius,
    SingularPairing,
    TagMismatch,
)

ALGEBRA_TOL = 1e-12
GROUP_TOL = 1e-10

ArrayLike = Any


# ---------------------------------------------------------------------------
# Tags and constraints
# ---------------------------------------------------------------------------


def standard_symplectic(n: int) -> np.ndarray:
    """Return the ``2n x 2n`` matrix ``[[0, I], [-I, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


_ETA_11 = np.diag([1.0, -1.0])


def _fro(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def _imag_norm(x: np.ndarray) -> float:
    return _fro(np.imag(x)) if np.iscomplexobj(x) else 0.0


def _sym_form_residual(x: np.ndarray, form: np.ndarray) -> float:
    return _fro(x.T @ form + form @ x)


def _group_form_residual(g: np.ndarray, form: np.ndarray) -> float:
    return _fro(g.T @ form @ g - form)


def _alg_residual(tag: str, x: np.ndarray) -> float:
    n = x.shape[0]
    if tag == "sl2R":
        return _imag_norm(x) + abs(np.trace(x))
    if tag == "sp2nR":
        return _imag_norm(x) + _sym_form_residual(np.real(x), standard_symplectic(n // 2))
    if tag in ("so2", "o_n"):
        return _imag_norm(x) + _fro(x + x.T)
    if tag == "so11":
        return _imag_norm(x) + _sym_form_residual(np.real(x), _ETA_11)
    if tag == "un":
        return _fro(x + x.conj().T)
    if tag == "u1":
        return abs(np.real(x[0, 0]))
    if tag == "su_n":
        return _fro(x + x.conj().T) + abs(np.trace(x))
    if tag == "b_n":
        return _fro(np.tril(x, -1)) + _fro(np.imag(np.diag(x))) + abs(np.trace(x))
    if tag == "slnC":
        return abs(np.trace(x))
    if tag == "gl":
        return _imag_norm(x)
    if tag == "glC":
        return 0.0
    raise TagMismatch(f"unknown algebra tag {tag!r}")


def _grp_residual(tag: str, g: np.ndarray) -> float:
    n = g.shape[0]
    eye = np.eye(n)
    if tag == "sl2R":
        return _imag_norm(g) + abs(np.linalg.det(g) - 1.0)
    if tag == "sp2nR":
        return _imag_norm(g) + _group_form_residual(np.real(g), standard_symplectic(n // 2))
    if tag == "so2":
        return _imag_norm(g) + _fro(g.T @ g - eye) + abs(np.linalg.det(g) - 1.0)
    if tag == "o_n":
        return _imag_norm(g) + _fro(g.T @ g - eye)
    if tag == "so11":
        return _imag_norm(g) + _group_form_residual(np.real(g), _ETA_11) + abs(np.linalg.det(g) - 1.0)
    if tag in ("un", "u1"):
        return _fro(g.conj().T @ g - eye)
    if tag == "su_n":
        return _fro(g.conj().T @ g - eye) + abs(np.linalg.det(g) - 1.0)
    if tag == "b_n":
        diag = np.diag(g)
        negative = float(np.sum(np.clip(-np.real(diag), 0.0, None)))
        return (_fro(np.tril(g, -1)) + _fro(np.imag(diag)) + negative
                + abs(np.linalg.det(g) - 1.0))
    if tag == "slnC":
        return abs(np.linalg.det(g) - 1.0)
    if tag in ("gl", "glC"):
        real = _imag_norm(g) if tag == "gl" else 0.0
        return real + (0.0 if abs(np.linalg.det(g)) > 1e-300 else np.inf)
    raise TagMismatch(f"unknown group tag {tag!r}")


def _size_ok(tag: str, n: int) -> bool:
    if tag in ("sl2R", "so2", "so11"):
        return n == 2
    if tag == "sp2nR":
        return n % 2 == 0 and n > 0
    if tag == "u1":
        return n == 1
    return n > 0


ALGEBRA_TAGS = ("sl2R", "sp2nR", "un", "so2", "so11", "su_n", "b_n",
                "o_n", "slnC", "gl", "glC", "u1")
COMPLEX_TAGS = frozenset({"un", "su_n", "b_n", "slnC", "glC", "u1"})


def algebra_residual(tag: str, x: ArrayLike) -> float:
    """Return the violation of the linear constraints of ``tag`` by ``x``."""
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or not _size_ok(tag, x.shape[0]):
        return np.inf
    return float(_alg_residual(tag, x))


def group_residual(tag: str, g: ArrayLike) -> float:
    """Return the violation of the group constraints of ``tag`` by ``g``."""
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or not _size_ok(tag, g.shape[0]):
        return np.inf
    return float(_grp_residual(tag, g))


def _freeze(entries: ArrayLike, tag: str) -> np.ndarray:
    arr = np.array(entries, dtype=complex if tag in COMPLEX_TAGS else None, copy=True)
    if tag not in COMPLEX_TAGS and np.iscomplexobj(arr):
        if _fro(np.imag(arr)) > ALGEBRA_TOL * max(1.0, _fro(arr)):
            raise ConstraintViolation(f"tag {tag!r} requires real entries")
        arr = np.real(arr).copy()
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MatrixAlgebraElement:
    """A square matrix representing an element of a tagged matrix Lie algebra.

    Attributes:
        entries: The matrix entries (copied and made read-only).
        algebra_tag: One of :data:`ALGEBRA_TAGS`.
        tolerance: Allowed constraint violation, relative to ``max(1, |X|)``.
    """

    entries: np.ndarray
    algebra_tag: str
    tolerance: float = ALGEBRA_TOL

    def __post_init__(self) -> None:
        if self.algebra_tag not in ALGEBRA_TAGS:
            raise TagMismatch(f"unknown algebra tag {self.algebra_tag!r}")
        arr = _freeze(self.entries, self.algebra_tag)
        object.__setattr__(self, "entries", arr)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ConstraintViolation("algebra elements must be square matrices")
        if not _size_ok(self.algebra_tag, arr.shape[0]):
            raise ConstraintViolation(
                f"size {arr.shape[0]} not allowed for tag {self.algebra_tag!r}")
        res = _alg_residual(self.algebra_tag, arr)
        if res > self.tolerance * max(1.0, _fro(arr)):
            raise ConstraintViolation(
                f"{self.algebra_tag} constraint violated by {res:.3e}")

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class MatrixGroupElement:
    """An invertible square matrix in a tagged matrix Lie group.

    The tag names the group whose Lie algebra carries the same tag, e.g.
    ``"sl2R"`` stands for SL(2, R) and ``"b_n"`` for upper-triangular
    matrices with positive diagonal and unit determinant.
    """

    entries: np.ndarray
    group_tag: str
    tolerance: float = GROUP_TOL

    def __post_init__(self) -> None:
        if self.group_tag not in ALGEBRA_TAGS:
            raise TagMismatch(f"unknown group tag {self.group_tag!r}")
        arr = _freeze(self.entries, self.group_tag)
        object.__setattr__(self, "entries", arr)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ConstraintViolation("group elements must be square matrices")
        if not _size_ok(self.group_tag, arr.shape[0]):
            raise ConstraintViolation(
                f"size {arr.shape[0]} not allowed for tag {self.group_tag!r}")
        res = _grp_residual(self.group_tag, arr)
        if not res <= self.tolerance * max(1.0, _fro(arr) ** 2):
            raise ConstraintViolation(
                f"{self.group_tag} group constraint violated by {res:.3e}")

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


def entries(x: Any) -> np.ndarray:
    """Return the raw array behind a typed element (or the array itself)."""
    if isinstance(x, (MatrixAlgebraElement, MatrixGroupElement)):
        return x.entries
    return np.asarray(x)


def tag_of(x: Any) -> str | None:
    if isinstance(x, MatrixAlgebraElement):
        return x.algebra_tag
    if isinstance(x, MatrixGroupElement):
        return x.group_tag
    return None


def _wrap_algebra(value: np.ndarray, tag: str | None, tolerance: float = ALGEBRA_TOL):
    if tag is None:
        return value
    return MatrixAlgebraElement(value, tag, tolerance)


def _wrap_group(value: np.ndarray, tag: str | None, tolerance: float = GROUP_TOL):
    if tag is None:
        return value
    return MatrixGroupElement(value, tag, tolerance)


def _check_compatible(g: Any, a: Any) -> None:
    tg, ta = tag_of(g), tag_of(a)
    if tg is not None and ta is not None and tg != ta:
        raise TagMismatch(f"group tag {tg!r} does not act on algebra tag {ta!r}")
    eg, ea = entries(g), entries(a)
    if eg.shape != ea.shape:
        raise TagMismatch(f"shape mismatch {eg.shape} vs {ea.shape}")


# ---------------------------------------------------------------------------
# Exponential, logarithm, adjoint
# ---------------------------------------------------------------------------


def commutator(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    a, b = entries(a), entries(b)
    return a @ b - b @ a


def _real_if_close(x: np.ndarray, reference: np.ndarray) -> np.ndarray:
    if not np.iscomplexobj(reference) and np.iscomplexobj(x):
        if _fro(np.imag(x)) <= 1e-10 * max(1.0, _fro(x)):
            return np.real(x)
    return x


def exp_matrix(a: Any):
    """Matrix exponential (Pade scaling-and-squaring via :func:`scipy.linalg.expm`).

    Returns a :class:`MatrixGroupElement` with the same tag when ``a`` is typed,
    otherwise an array.
    """
    x = entries(a)
    value = _real_if_close(scipy.linalg.expm(x), x)
    return _wrap_group(value, tag_of(a))


def _log_raw(g: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        value = scipy.linalg.logm(g, disp=False)[0]
    return _real_if_close(np.asarray(value), g)


def log_matrix(g: Any):
    """Principal matrix logarithm near the identity.

    Raises:
        OutOfInjectivityRadius: if ``|g - I|_2 >= 1`` or the round trip through
            the exponential does not reproduce ``g`` within 1e-9.
    """
    x = entries(g)
    eye = np.eye(x.shape[0])
    if np.linalg.norm(x - eye, 2) >= 1.0:
        raise OutOfInjectivityRadius(
            f"|g - I| = {np.linalg.norm(x - eye, 2):.3f} is outside the unit ball")
    value = _log_raw(x)
    if not np.all(np.isfinite(value)):
        raise OutOfInjectivityRadius("logarithm did not converge")
    if _fro(scipy.linalg.expm(value) - x) > 1e-9 * max(1.0, _fro(x)):
        raise OutOfInjectivityRadius("logarithm round trip failed")
    tag = tag_of(g)
    return _wrap_algebra(value, tag, 1e-10) if tag else value


def adjoint(g: Any, a: Any):
    """``Ad_g A = g A g^{-1}``."""
    _check_compatible(g, a)
    gm = entries(g)
    value = gm @ entries(a) @ np.linalg.inv(gm)
    tag = tag_of(a) or tag_of(g)
    if tag is None or not isinstance(a, MatrixAlgebraElement):
        return value
    return MatrixAlgebraElement(value, tag, 1e-10)


# ---------------------------------------------------------------------------
# Group models
# ---------------------------------------------------------------------------


class MatrixGroupModel:
    """Multiplicative matrix group, optionally carrying a constraint tag."""

    abelian = False

    def __init__(self, dim: int, tag: str | None = None, complex_: bool | None = None):
        self.dim = dim
        self.tag = tag
        self.complex = (tag in COMPLEX_TAGS) if complex_ is None else complex_

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex if self.complex else float)

    def mul(self, a, b):
        return entries(a) @ entries(b)

    def inv(self, a):
        return np.linalg.inv(entries(a))

    def exp(self, x):
        x = entries(x)
        return _real_if_close(scipy.linalg.expm(x), x)

    def log(self, g):
        return _log_raw(entries(g))

    def ad(self, g, x):
        g = entries(g)
        return g @ entries(x) @ np.linalg.inv(g)

    def bracket(self, x, y):
        return commutator(x, y)

    def local_difference(self, g, g0):
        """Left-trivialised displacement ``g0^{-1} (g - g0)``."""
        g0 = entries(g0)
        return np.linalg.solve(g0, entries(g) - g0)

    def distance(self, g0, g1) -> float:
        return _fro(self.log(np.linalg.solve(entries(g0), entries(g1))))

    def project(self, g):
        """Return the nearest group element and the size of the correction."""
        g = entries(g)
        tag = self.tag
        if tag in ("so2", "o_n", "un", "u1", "su_n"):
            u, _, vh = np.linalg.svd(g)
            p = u @ vh
            if tag == "su_n":
                p = p / np.linalg.det(p) ** (1.0 / self.dim)
        elif tag in ("sl2R", "slnC"):
            det = np.linalg.det(g)
            p = g / det ** (1.0 / self.dim) if np.real(det) > 0 or tag == "slnC" else g
        else:
            p = g
        return p, _fro(p - g)


class VectorGroupModel:
    """A real vector space viewed as an abelian group under addition."""

    abelian = True

    def __init__(self, shape: int | tuple[int, ...]):
        self.shape = (shape,) if isinstance(shape, int) else tuple(shape)

    def identity(self) -> np.ndarray:
        return np.zeros(self.shape)

    def mul(self, a, b):
        return entries(a) + entries(b)

    def inv(self, a):
        return -entries(a)

    def exp(self, x):
        return np.array(entries(x), dtype=float)

    def log(self, g):
        return np.array(entries(g), dtype=float)

    def ad(self, g, x):
        return entries(x)

    def bracket(self, x, y):
        return np.zeros_like(entries(x), dtype=float)

    def local_difference(self, g, g0):
        return entries(g) - entries(g0)

    def distance(self, g0, g1) -> float:
        return _fro(entries(g1) - entries(g0))

    def project(self, g):
        return entries(g), 0.0


class TorusGroupModel(VectorGroupModel):
    """The torus ``R^n / L`` where ``L`` is spanned by the columns of ``lattice``.

    Elements are stored as representatives in ``R^n``; all comparisons are made
    modulo the lattice.
    """

    def __init__(self, lattice: ArrayLike):
        lattice = np.atleast_2d(np.asarray(lattice, dtype=float))
        super().__init__(lattice.shape[0])
        self.lattice = lattice
        self._lattice_inv = np.linalg.inv(lattice)

    def wrap(self, v):
        """Representative of ``v`` closest to the origin (lattice coordinates in [-1/2, 1/2))."""
        v = np.asarray(entries(v), dtype=float)
        coords = np.tensordot(self._lattice_inv, v, axes=(1, 0))
        coords = coords - np.floor(coords + 0.5)
        return np.tensordot(self.lattice, coords, axes=(1, 0))

    def lattice_coordinates(self, v) -> np.ndarray:
        return np.tensordot(self._lattice_inv, np.asarray(v, dtype=float), axes=(1, 0))

    def mul(self, a, b):
        return entries(a) + entries(b)

    def log(self, g):
        return self.wrap(g)

    def local_difference(self, g, g0):
        return self.wrap(entries(g) - entries(g0))

    def distance(self, g0, g1) -> float:
        return _fro(self.wrap(entries(g1) - entries(g0)))


def circle_group() -> TorusGroupModel:
    """``U(1)`` written additively as angles modulo 1."""
    return TorusGroupModel(np.eye(1))


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualPairing:
    """A bilinear pairing ``kappa(A, mu)`` between a Lie algebra and its dual.

    Attributes:
        form: Bilinear evaluator on raw arrays, returning a real scalar.
        basis_left: Ordered basis of the algebra (left slot).
        basis_right: Ordered basis of the dual algebra (right slot).
        left_tag, right_tag: Algebra tags of both sides (``None`` for vectors).
        left_group, right_group: Group models integrating both sides.
        name: Human-readable label.
    """

    form: Callable[[np.ndarray, np.ndarray], float]
    basis_left: tuple
    basis_right: tuple
    left_tag: str | None = None
    right_tag: str | None = None
    left_group: Any = None
    right_group: Any = None
    name: str = ""
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        left = tuple(np.asarray(entries(b)) for b in self.basis_left)
        right = tuple(np.asarray(entries(b)) for b in self.basis_right)
        object.__setattr__(self, "basis_left", left)
        object.__setattr__(self, "basis_right", right)
        if len(left) != len(right):
            raise SingularPairing("bases of different lengths")
        gram = np.array([[self.form(a, b) for b in right] for a in left], dtype=float)
        if gram.size and not np.linalg.cond(gram) < 1e12:
            raise SingularPairing("Gram matrix is singular")
        gram.setflags(write=False)
        object.__setattr__(self, "gram", gram)

    @property
    def dim(self) -> int:
        return len(self.basis_left)

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.gram)) if self.gram.size else 1.0

    def __call__(self, a: Any, mu: Any) -> float:
        return float(np.real(self.form(entries(a), entries(mu))))

    def right_coords(self, mu: Any) -> np.ndarray:
        """Coordinates of ``mu`` in ``basis_right`` (via the Gram matrix)."""
        values = np.array([self.form(b, entries(mu)) for b in self.basis_left], dtype=float)
        return np.linalg.solve(self.gram, values)

    def left_coords(self, a: Any) -> np.ndarray:
        values = np.array([self.form(entries(a), b) for b in self.basis_right], dtype=float)
        return np.linalg.solve(self.gram.T, values)

    def right_from_coords(self, coords: ArrayLike) -> np.ndarray:
        return sum(c * b for c, b in zip(coords, self.basis_right))

    def left_from_coords(self, coords: ArrayLike) -> np.ndarray:
        return sum(c * b for c, b in zip(coords, self.basis_left))

    def solve_right(self, values: ArrayLike) -> np.ndarray:
        """The dual element ``nu`` with ``kappa(basis_left[i], nu) = values[i]``."""
        try:
            coords = np.linalg.solve(self.gram, np.asarray(values, dtype=float))
        except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded in init
            raise SingularPairing(str(exc)) from exc
        return self.right_from_coords(coords)

    def solve_left(self, values: ArrayLike) -> np.ndarray:
        """The algebra element ``A`` with ``kappa(A, basis_right[j]) = values[j]``."""
        try:
            coords = np.linalg.solve(self.gram.T, np.asarray(values, dtype=float))
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise SingularPairing(str(exc)) from exc
        return self.left_from_coords(coords)

    def swapped(self) -> "DualPairing":
        """The same pairing read from the dual side, ``(mu, A) -> kappa(A, mu)``."""
        form = self.form
        return DualPairing(lambda x, y: form(y, x), self.basis_right, self.basis_left,
                           self.right_tag, self.left_tag, self.right_group,
                           self.left_group, self.name + "^T")

    def bilinearity_residual(self, rng: np.random.Generator, samples: int = 20) -> float:
        worst = 0.0
        for _ in range(samples):
            ca, cb, cm = rng.normal(size=(3, self.dim))
            a, b = self.left_from_coords(ca), self.left_from_coords(cb)
            mu = self.right_from_coords(cm)
            s, t = rng.normal(size=2)
            lhs = self(s * a + t * b, mu)
            rhs = s * self(a, mu) + t * self(b, mu)
            worst = max(worst, abs(lhs - rhs))
        return worst


def coadjoint(g: Any, mu: Any, pairing: DualPairing):
    """``Coad_g mu``: the element with ``kappa(A, Coad_g mu) = kappa(Ad_g A, mu)``."""
    model = pairing.left_group or MatrixGroupModel(entries(g).shape[0])
    m = entries(mu)
    values = [pairing.form(model.ad(entries(g), b), m) for b in pairing.basis_left]
    value = pairing.solve_right(values)
    if isinstance(mu, MatrixAlgebraElement):
        return MatrixAlgebraElement(value, mu.algebra_tag, 1e-10)
    return value


def infinitesimal_coadjoint(a: Any, mu: Any, pairing: DualPairing):
    """``coad_A mu``: the element with ``kappa(B, coad_A mu) = kappa([A, B], mu)``."""
    model = pairing.left_group or MatrixGroupModel(entries(a).shape[0])
    m = entries(mu)
    values = [pairing.form(model.bracket(entries(a), b), m) for b in pairing.basis_left]
    value = pairing.solve_right(values)
    if isinstance(mu, MatrixAlgebraElement):
        return MatrixAlgebraElement(value, mu.algebra_tag, 1e-10)
    return value


# ---------------------------------------------------------------------------
# Logarithmic derivative
# ---------------------------------------------------------------------------

_STENCILS = {
    2: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    4: (np.array([-2, -1, 1, 2]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}


def _model_for(value: Any, group: Any):
    if group is not None:
        return group
    arr = entries(value)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return MatrixGroupModel(arr.shape[0], tag_of(value))
    return VectorGroupModel(arr.shape)


def log_derivative(curve: Callable[[float], Any] | tuple[Sequence[float], Sequence[Any]],
                   t: float, step: float = 1e-3, group: Any = None, order: int = 4):
    """Left logarithmic derivative ``g(t)^{-1} g'(t)`` by central differences.

    Args:
        curve: Either a callable ``t -> g(t)`` or a pair ``(ts, values)`` of
            uniformly spaced samples containing ``t``.
        t: Parameter value.
        step: Difference step for callables (must not exceed 1e-3 for the
            default fourth-order stencil).
        group: Group model; inferred from the values when omitted.
        order: 2 or 4.

    Raises:
        InsufficientSamples: when the stencil does not fit the samples or the
            step is too coarse.
    """
    if order not in _STENCILS:
        raise InsufficientSamples(f"unsupported stencil order {order}")
    offsets, weights = _STENCILS[order]
    if callable(curve):
        if order == 4 and step > 1e-3:
            raise InsufficientSamples(f"step {step} exceeds 1e-3")
        center = curve(t)
        values = [curve(t + k * step) for k in offsets]
        h = step
    else:
        ts, samples = np.asarray(curve[0], dtype=float), list(curve[1])
        if len(ts) < 2 * max(offsets) + 1:
            raise InsufficientSamples("too few samples for the stencil")
        i = int(np.argmin(np.abs(ts - t)))
        if abs(ts[i] - t) > 1e-12 * max(1.0, abs(t)):
            raise InsufficientSamples("t is not a sample point")
        if i + min(offsets) < 0 or i + max(offsets) >= len(ts):
            raise InsufficientSamples("stencil leaves the sampled interval")
        local = ts[i + min(offsets): i + max(offsets) + 1]
        h = float(np.mean(np.diff(local)))
        if np.max(np.abs(np.diff(local) - h)) > 1e-9 * h:
            raise InsufficientSamples("samples are not uniformly spaced")
        if order == 4 and h > 1e-3 * (1 + 1e-9):
            raise InsufficientSamples(f"sample spacing {h} exceeds 1e-3")
        center = samples[i]
        values = [samples[i + k] for k in offsets]
    model = _model_for(center, group)
    deriv = sum(w * model.local_difference(v, center) for w, v in zip(weights, values)) / h
    tag = tag_of(center)
    if tag is not None:
        return MatrixAlgebraElement(deriv, tag, 1e-6)
    return deriv


# ---------------------------------------------------------------------------
# Standard bases and pairings
# ---------------------------------------------------------------------------


def sl2_generators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(e_plus, e_minus, h)`` with ``h`` the rotation generator.

    They satisfy ``[h, e_+] = -2 e_-``, ``[h, e_-] = 2 e_+`` and
    ``[e_+, e_-] = 2 h`` and are orthonormal of signature (+, +, -) for
    ``kappa(A, B) = tr(AB) / 2``.
    """
    e_plus = np.array([[1.0, 0.0], [0.0, -1.0]])
    e_minus = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return e_plus, e_minus, h


def half_trace(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.real(np.trace(a @ b)))


def sl2_pairing() -> DualPairing:
    """Self-dual trace pairing ``tr(AB)/2`` on sl(2, R)."""
    basis = sl2_generators()
    model = MatrixGroupModel(2, "sl2R")
    return DualPairing(half_trace, basis, basis, "sl2R", "sl2R", model, model, "sl2-trace")


def sp_basis(n: int) -> list[np.ndarray]:
    """Basis of sp(2n, R): blocks ``[[a, b], [c, -a^T]]`` with ``b, c`` symmetric."""
    basis = []
    for i in range(n):
        for j in range(n):
            m = np.zeros((2 * n, 2 * n))
            m[i, j] = 1.0
            m[n + j, n + i] = -1.0
            basis.append(m)
    for i in range(n):
        for j in range(i, n):
            for offset in ((0, n), (n, 0)):
                m = np.zeros((2 * n, 2 * n))
                m[offset[0] + i, offset[1] + j] = 1.0
                m[offset[0] + j, offset[1] + i] = 1.0
                basis.append(m)
    return basis


def skew_basis(m: int) -> list[np.ndarray]:
    basis = []
    for i in range(m):
        for j in range(i + 1, m):
            x = np.zeros((m, m))
            x[i, j], x[j, i] = 1.0, -1.0
            basis.append(x)
    return basis


def neg_half_trace(a: np.ndarray, b: np.ndarray) -> float:
    return -0.5 * float(np.real(np.trace(a @ b)))


def sp_pairing(n: int) -> DualPairing:
    """Self-dual pairing ``-tr(AB)/2`` on sp(2n, R).

    This normalisation makes ``X -> -X X^T J`` the momentum map of the
    left-multiplication action on ``(M(2n x k), tr(X^T J Y))``.
    """
    basis = sp_basis(n)
    model = MatrixGroupModel(2 * n, "sp2nR")
    return DualPairing(neg_half_trace, basis, basis, "sp2nR", "sp2nR", model, model, "sp-trace")


def o_pairing(m: int) -> DualPairing:
    """Self-dual pairing ``tr(A B^T)/2 = -tr(AB)/2`` on o(m)."""
    basis = skew_basis(m)
    model = MatrixGroupModel(m, "o_n")
    return DualPairing(neg_half_trace, basis, basis, "o_n", "o_n", model, model, "o-trace")


def vector_pairing(dim: int, matrix: ArrayLike | None = None,
                   left_group: Any = None, right_group: Any = None) -> DualPairing:
    """Pairing ``x^T M y`` between two copies of ``R^dim`` viewed as abelian groups."""
    mat = np.eye(dim) if matrix is None else np.asarray(matrix, dtype=float)
    basis = tuple(np.eye(dim))
    return DualPairing(lambda x, y: float(np.asarray(x) @ mat @ np.asarray(y)),
                       basis, basis, None, None,
                       left_group or VectorGroupModel(dim),
                       right_group or VectorGroupModel(dim), "vector")


def circle_pairing() -> DualPairing:
    """``kappa(x, y) = xy`` between two copies of ``u(1) = R`` (angles mod 1)."""
    return vector_pairing(1, None, circle_group(), circle_group())


def su_basis(n: int) -> list[np.ndarray]:
    basis = []
    for k in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[k, k], m[k + 1, k + 1] = 1j, -1j
        basis.append(m)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k], m[k, j] = 1.0, -1.0
            basis.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k], m[k, j] = 1j, 1j
            basis.append(m)
    return basis


def borel_basis(n: int) -> list[np.ndarray]:
    """Basis of the Lie algebra of upper-triangular, real-positive-diagonal SL(n, C)."""
    basis = []
    for k in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[k, k], m[k + 1, k + 1] = 1.0, -1.0
        basis.append(m)
    for j in range(n):
        for k in range(j + 1, n):
            for unit in (1.0, 1j):
                m = np.zeros((n, n), dtype=complex)
                m[j, k] = unit
                basis.append(m)
    return basis


def im_trace(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.imag(np.trace(a @ b)))


def iwasawa_pairing(n: int = 2) -> DualPairing:
    """``Im tr(XY)`` between su(n) (left) and the triangular algebra b (right)."""
    return DualPairing(im_trace, su_basis(n), borel_basis(n), "su_n", "b_n",
                       MatrixGroupModel(n, "su_n"), MatrixGroupModel(n, "b_n"), "iwasawa")


def random_algebra(tag: str, n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random element of a tagged algebra (raw array), Gaussian coordinates."""
    if tag == "sl2R":
        basis: Sequence[np.ndarray] = sl2_generators()
    elif tag == "sp2nR":
        basis = sp_basis(n // 2)
    elif tag in ("so2", "o_n"):
        basis = skew_basis(n)
    elif tag == "so11":
        basis = [np.array([[0.0, 1.0], [1.0, 0.0]])]
    elif tag == "su_n":
        basis = su_basis(n)
    elif tag == "un":
        basis = su_basis(n) + [1j * np.eye(n)]
    elif tag == "b_n":
        basis = borel_basis(n)
    elif tag == "slnC":
        real = borel_basis(n) + [b.T for b in borel_basis(n) if np.any(np.triu(b, 1))]
        basis = real + [1j * b for b in real]
    elif tag == "u1":
        basis = [np.array([[1j]])]
    else:
        return scale * rng.normal(size=(n, n))
    coeffs = rng.normal(size=len(basis)) * scale
    return sum(c * b for c, b in zip(coeffs, basis))


def rotation(theta: float) -> np.ndarray:
    """``exp(theta h) = [[cos, sin], [-sin, cos]]``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])
