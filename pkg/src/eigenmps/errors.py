"""Exception taxonomy shared by all modules.

The CLI maps these onto distinct exit codes, so new failure modes should
subclass one of the three top-level categories below.
"""


class EigenmpsError(Exception):
    """Base class for all package errors."""


class ValidationError(EigenmpsError):
    """Invalid arguments, malformed inputs, or violated preconditions."""


class ShapeError(ValidationError):
    """Dimension or length mismatch between operands."""


class CapacityError(ValidationError):
    """Problem size outside the supported desk-scale range."""


class DimacsError(ValidationError):
    """Malformed DIMACS CNF input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NumericalError(EigenmpsError):
    """Numerical failure at run time, e.g. a non-finite objective value."""
