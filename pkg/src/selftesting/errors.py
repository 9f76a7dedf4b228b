"""Exception hierarchy. The CLI maps these onto stable exit codes."""


class SelfTestingError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(SelfTestingError, ValueError):
    """Malformed or inconsistent input (shapes, labels, parse failures)."""


class ValidationError(InvalidInputError):
    """An object violates a structural relation (POVM completeness, PSD, ...).

    ``relation`` names the failing relation and ``residual`` its measured size.
    """

    def __init__(self, relation: str, residual: float, message: str | None = None):
        self.relation = relation
        self.residual = float(residual)
        super().__init__(message or f"{relation}: residual {self.residual:.3e}")


class PreconditionError(SelfTestingError):
    """Input is well formed but violates an operation's mathematical precondition."""


class DegeneracyError(PreconditionError):
    """A bias or normalising quantity vanished."""


class DegenerateGapError(PreconditionError):
    """The spectral gap is zero, so gap-based bounds are undefined."""


class NumericalError(SelfTestingError, ArithmeticError):
    """An iterative routine failed to converge."""
