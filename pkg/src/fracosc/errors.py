"""Exception taxonomy shared by the whole package.

Every failure mode that callers are expected to handle gets its own class so
the CLI can map them onto stable exit codes (see :mod:`fracosc.cli`):

* bad input / unparsable text        -> ParseError        (exit 1)
* mathematically inadmissible input  -> DomainError       (exit 2)
* evaluation failed at a point       -> EvalError         (exit 2)
* singular chart map / rank failure  -> SingularityError  (exit 2)
* requested accuracy not reached     -> AccuracyError     (exit 3)
"""


class FracoscError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FracoscError):
    """Input is outside the mathematical domain of the operation.

    Raised e.g. for power exponents strictly between 0 and the derivative
    order, gamma-function poles, non-positive base points where a fractional
    power weight is needed, or orders outside (0, 1].
    """


class AccuracyError(FracoscError):
    """An iterative/truncated computation could not meet its tolerance."""


class EvalError(FracoscError):
    """Expression evaluation failed at a concrete point (0^negative, etc.)."""


class ParseError(FracoscError):
    """Malformed expression or config text.

    Carries 1-based ``line``/``col`` when they are known so the CLI can point
    at the offending character.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, col {col})"
        super().__init__(message)


class SingularityError(FracoscError):
    """A map or matrix that must be invertible is singular at the point."""
