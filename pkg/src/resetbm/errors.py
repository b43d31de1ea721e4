"""Exception types shared across the package."""


class ResetBMError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ResetBMError, ValueError):
    """A numeric argument violates an operation's preconditions."""


class UnsupportedInputError(ResetBMError, ValueError):
    """Input is valid but handled by a different routine (e.g. stationary x0)."""


class DomainError(ResetBMError, ValueError):
    """The evaluation point lies outside the formula's validity region."""


class UnsupportedRegimeError(ResetBMError, ValueError):
    """An asymptotic evaluator was called outside its proven regime."""


class UncoveredCaseError(ResetBMError, ValueError):
    """The requested case is an open problem; no value is returned."""


class BracketError(ResetBMError, ValueError):
    """The target of a monotone inversion is not bracketed by [f(lo), f(hi)]."""


class ContractViolationError(ResetBMError, ValueError):
    """A user-supplied callable broke its documented contract."""


class EvaluationError(ResetBMError, ArithmeticError):
    """An integrand returned a non-finite value.

    Carries the offending abscissa so the caller can locate the problem.
    """

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa
