"""Exception hierarchy.

Everything raised on purpose by the library derives from :class:`PnmcError`.
``ValidationError`` marks bad caller input (CLI exit code 2); every other
subclass is a numerical failure (CLI exit code 3).
"""


class PnmcError(Exception):
    pass


class ValidationError(PnmcError, ValueError):
    pass


class NumericalError(PnmcError, ArithmeticError):
    pass


# pseudo_euclidean
class DegenerateSpan(NumericalError):
    pass


class LightlikeStep(NumericalError):
    pass


# surface
class OutOfDomain(NumericalError):
    pass


class NotSpacelike(NumericalError):
    pass


class DegenerateMetric(NumericalError):
    pass


# frame_invariants
class NotNormal(NumericalError):
    pass


class MinimalPoint(NumericalError):
    pass


class FrameDegenerate(NumericalError):
    pass


class FrameFlip(NumericalError):
    pass


# canonical
class NotOrthogonal(NumericalError):
    pass


class NotSeparable(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class NonMonotone(NumericalError):
    pass


class DomainViolation(NumericalError):
    pass


# pde / reconstruct / meridian
class GridTooSmall(NumericalError):
    pass


class MuVanishes(NumericalError):
    pass


class DriftExceeded(NumericalError):
    pass
