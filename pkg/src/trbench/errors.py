"""Exception types shared across the solver stack."""


class ShiftTooSmallError(ValueError):
    """gamma * sigma is below the stability floor of the shifted recursion.

    Callers should fall back to the unshifted two-loop solve.
    """


class NumericalBreakdownError(ArithmeticError):
    """A recursion denominator lost positivity or fell under the guard."""


class DegenerateDerivativeError(ArithmeticError):
    """The Newton step for the boundary multiplier has zero derivative."""


class ModelInconsistencyError(ArithmeticError):
    """Predicted model reduction is not positive; indicates a solver bug."""


class CsvFormatError(ValueError):
    """A results file does not match the expected schema."""
