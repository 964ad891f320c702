"""Exception taxonomy shared by the library, the service and the CLI."""

from __future__ import annotations


class MiepairError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(MiepairError, ValueError):
    """An argument is outside the documented domain (wrong sign, non-finite, ...)."""


class SingularArgumentError(InvalidArgumentError):
    """The requested evaluation point is a singularity of the function."""


class DomainError(MiepairError, ValueError):
    """A physically meaningful input lies outside the supported region."""


class GeometryError(DomainError):
    """Scene geometry violates an invariant (atom inside matter, r1 >= r2, ...)."""


class ParseError(MiepairError, ValueError):
    """A configuration document does not match the published schema."""


class NumericalDegeneracyError(MiepairError, ArithmeticError):
    """A coefficient denominator degenerated below the representable range."""

    def __init__(self, message: str, *, order: int, omega: float) -> None:
        super().__init__(message)
        self.order = order
        self.omega = omega


class TruncationError(MiepairError, ArithmeticError):
    """A modal series failed to converge within the allowed number of orders."""

    def __init__(self, message: str, *, n_max: int, tail_estimate: float) -> None:
        super().__init__(message)
        self.n_max = n_max
        self.tail_estimate = tail_estimate


class QuadratureError(MiepairError, ArithmeticError):
    """A frequency quadrature did not converge on the supplied grid."""


class InvalidStateError(MiepairError, ValueError):
    """A quantum state violates its invariants (norm, positivity, trace)."""


class InternalConsistencyError(MiepairError, RuntimeError):
    """Two internal computation routes disagree beyond round-off."""


class TableAlignmentError(MiepairError, ValueError):
    """Two result tables cannot be compared because their grids differ."""


# Process exit codes used by the CLI (and echoed by the service in error bodies).
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_GEOMETRY = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code contract."""
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, (GeometryError, DomainError, InvalidArgumentError, InvalidStateError)):
        return EXIT_GEOMETRY
    if isinstance(exc, (NumericalDegeneracyError, TruncationError, QuadratureError, InternalConsistencyError)):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_FAILURE
