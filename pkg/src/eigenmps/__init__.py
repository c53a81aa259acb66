"""Variational bounded-rank MPS approximation of black-box unitary eigenvectors."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CapacityError,
    DimacsError,
    EigenmpsError,
    NumericalError,
    ShapeError,
    ValidationError,
)
