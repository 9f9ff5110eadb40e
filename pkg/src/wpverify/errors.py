"""Exception hierarchy shared by the series kernel and the verifiers."""


class WPVerifyError(Exception):
    pass


class DivisionByZero(WPVerifyError, ZeroDivisionError):
    pass


class OrderMismatch(WPVerifyError, ValueError):
    pass


class NonInvertible(WPVerifyError, ArithmeticError):
    pass


class NegativeExponent(WPVerifyError, ArithmeticError):
    """A monomial or product with a negative p-exponent was materialized."""


class NotAPerfectRoot(WPVerifyError, ArithmeticError):
    pass


class NonTruncating(WPVerifyError, ArithmeticError):
    """An infinite sum hit its term cap without its tail leaving the window."""


class PoleInDenominator(WPVerifyError, ArithmeticError):
    pass


class DegenerateParameter(WPVerifyError, ArithmeticError):
    """A factor vanishes exactly, so a sum may sit on a removable singularity."""


class ConstraintViolation(WPVerifyError, ValueError):
    """A parameter environment does not satisfy a pair's admissibility rule."""


class SamplerExhausted(WPVerifyError, RuntimeError):
    pass


class UnknownIdentity(WPVerifyError, KeyError):
    pass


# Any of these means the environment, not the identity, is at fault.
ADMISSIBILITY_ERRORS = (
    DivisionByZero,
    NegativeExponent,
    NotAPerfectRoot,
    NonTruncating,
    PoleInDenominator,
    DegenerateParameter,
    ConstraintViolation,
)
