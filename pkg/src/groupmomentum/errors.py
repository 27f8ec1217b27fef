"""Exception types raised by the toolkit.

Every error derives from :class:`GroupMomentumError` so callers (notably the
command-line runner) can distinguish invalid input from tolerance failures.
"""

from __future__ import annotations


class GroupMomentumError(Exception):
    """Base class for all toolkit errors."""


class ConstraintViolation(GroupMomentumError, ValueError):
    """A matrix does not satisfy the defining constraints of its tag."""


class TagMismatch(GroupMomentumError, ValueError):
    """Two operands carry incompatible algebra/group tags."""


class OutOfInjectivityRadius(GroupMomentumError, ValueError):
    """The matrix logarithm was requested too far from the identity."""


class SingularPairing(GroupMomentumError, ValueError):
    """The Gram matrix of a pairing cannot be inverted."""


class InsufficientSamples(GroupMomentumError, ValueError):
    """A sampled curve is too coarse for the requested difference stencil."""


class ChartBoundary(GroupMomentumError, ValueError):
    """An evaluator failed inside a finite-difference neighbourhood."""


class IntegratorDiverged(GroupMomentumError, RuntimeError):
    """The implicit midpoint iteration did not converge."""


class PreconditionFailed(GroupMomentumError, ValueError):
    """Inputs to a composition rule do not satisfy their own relations."""


class AdjointMismatch(GroupMomentumError, ValueError):
    """A dual projection is not the pairing-adjoint of an inclusion."""


class DegreeOverflow(GroupMomentumError, ValueError):
    """A requested form or cochain degree is out of range."""


class DegreeMismatch(GroupMomentumError, ValueError):
    """A form has the wrong degree for the requested operation."""


class SkewSymmetryViolated(GroupMomentumError, ValueError):
    """A derived Poisson map fails skew-symmetry."""


class CocycleLawViolated(GroupMomentumError, ValueError):
    """A candidate cocycle does not satisfy c(gh) = c(g) + g.c(h)."""


class SingularInput(GroupMomentumError, ValueError):
    """A decomposition was requested for a singular matrix."""


class ZeroElement(GroupMomentumError, ValueError):
    """Orbit classification of the zero element was requested."""


class NotPrequantizable(GroupMomentumError, ValueError):
    """The orbit label does not satisfy the integrality condition."""


class NotPositiveDefinite(GroupMomentumError, ValueError):
    """A matrix expected to be symmetric positive definite is not."""


class NotInLevelSet(GroupMomentumError, ValueError):
    """A point does not lie in the requested momentum level set."""


class NoSolution(GroupMomentumError, ValueError):
    """A linear system for a primitive form is inconsistent."""


class StepTooLarge(GroupMomentumError, RuntimeError):
    """Group re-projection had to correct more than its tolerance."""


class NotClosedForm(GroupMomentumError, ValueError):
    """A form expected to be closed has a non-negligible differential."""


class NonRealOutput(GroupMomentumError, ValueError):
    """A quantity expected to be real carries an imaginary part."""


class LayoutMismatch(GroupMomentumError, ValueError):
    """Grid layouts of two fields, or of a field and its declared axes, differ."""


class ShapeMismatch(GroupMomentumError, ValueError):
    """Array shapes of grid data are inconsistent."""


class DimensionMismatch(GroupMomentumError, ValueError):
    """An operation requires a different base dimension."""


class UnknownExperiment(GroupMomentumError, KeyError):
    """The requested experiment name is not registered."""


class ConfigInvalid(GroupMomentumError, ValueError):
    """An experiment configuration is malformed."""
