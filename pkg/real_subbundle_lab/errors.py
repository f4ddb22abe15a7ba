"""
Error types for the real subbundle lab.

Library code raises these; the command-line boundary turns them into a
one-line message and a nonzero exit code.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""


class LabError(Exception):
    """Base class of every error raised by the lab."""


class DegreeError(LabError):
    """The sextic model needs a nonzero leading coefficient."""


class NotSquarefree(LabError):
    """Two roots of f are closer than the squarefree gate."""


class NonRealCoefficient(LabError):
    """A coefficient is complex, infinite or NaN."""


class EmptyRealLocus(LabError):
    """The chosen lift has no fixed points."""


class OffCurve(LabError):
    """A point does not satisfy y^2 = f(x) to tolerance."""


class EmptyRegion(LabError):
    """The requested region does not exist on this curve."""


class AmbiguousMatch(LabError):
    """Multiset matching found two candidates too close to tell apart."""


class NotReal(LabError):
    """A real divisor was required."""


class DegreeMismatch(LabError):
    """Divisors of different degrees were compared."""


class DegreeTooLarge(LabError):
    """Interpolation is only set up for degree at most 4."""


class IllConditioned(LabError):
    """The singular-value decision is too close to the threshold."""


class BadParity(LabError):
    """A bit vector or count vector has the wrong parity."""


class InvalidAssignment(LabError):
    """A circle assignment is not admissible for the signature."""


class RecipeUnavailable(LabError):
    """A survey recipe cannot be realized on this curve and determinant."""


class AllTrialsDegenerate(LabError):
    """Every survey trial was discarded."""


class InsufficientData(LabError):
    """Too few nondegenerate trials to issue a verdict."""


class CoincidentLambda(LabError):
    """Two pencil parameters coincide."""


class NoRealPointsFound(LabError):
    """The sampler exhausted its plane budget without a real point."""


class SingularPoint(LabError):
    """The derivative of the quadric pair drops rank at a point."""


class InvariantViolation(LabError):
    """An internal consistency check failed."""


__all__ = [
    "AllTrialsDegenerate",
    "AmbiguousMatch",
    "BadParity",
    "CoincidentLambda",
    "DegreeError",
    "DegreeMismatch",
    "DegreeTooLarge",
    "EmptyRealLocus",
    "EmptyRegion",
    "IllConditioned",
    "InsufficientData",
    "InvalidAssignment",
    "InvariantViolation",
    "LabError",
    "NoRealPointsFound",
    "NonRealCoefficient",
    "NotReal",
    "NotSquarefree",
    "OffCurve",
    "RecipeUnavailable",
    "SingularPoint",
]
