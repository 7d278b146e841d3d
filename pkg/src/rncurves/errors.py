"""Exception hierarchy.

Errors caused by bad input derive from :class:`InputError` (a ``ValueError``);
errors raised when a numerical procedure fails on valid input derive from
:class:`NumericalError`.  The command line maps these to exit codes 2 and 1.
"""


class RNCurvesError(Exception):
    pass


class InputError(RNCurvesError, ValueError):
    pass


class NumericalError(RNCurvesError, ArithmeticError):
    pass


class DegenerateCurve(InputError):
    pass


class PathTooCloseToBranchPoint(InputError):
    pass


class OrderTooLarge(InputError):
    pass


class NotRealBranchPoints(InputError):
    pass


class ComplexBranchPoints(InputError):
    pass


class RatioOutOfRange(InputError):
    pass


class NoConvergence(NumericalError):
    pass


class SingularNormalizationSystem(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class ODEFailure(NumericalError):
    pass


class EdgeCountMismatch(NumericalError):
    pass


class FitIllConditioned(NumericalError):
    pass


class NoSolutionInBracket(NumericalError):
    def __init__(self, message, bracket=None, values=None):
        super().__init__(message)
        self.bracket = bracket
        self.values = values


class MultipleSignChanges(NumericalError):
    pass


class RankDeficientConstraint(NumericalError):
    pass
