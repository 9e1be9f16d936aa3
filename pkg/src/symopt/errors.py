"""Exception hierarchy shared by every module."""


class SymoptError(Exception):
    """Base class for all library errors."""


class DomainError(SymoptError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class SingularError(SymoptError, ArithmeticError):
    """A kernel or Mobius map is evaluated at a singular parameter."""


class ShapeError(SymoptError, ValueError):
    """Two fields or grids that must agree do not."""


class ParseError(SymoptError, ValueError):
    """A text file does not follow the documented format.

    Parameters
    ----------
    message : str
        Human readable description.
    line : int, optional
        One-based line number where the problem was detected.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalIntegrityError(SymoptError, RuntimeError):
    """A numerical self-check failed (residual above its hard limit)."""


class RepresentationError(NumericalIntegrityError):
    """A sampled function is not captured by a finite basis expansion."""


class InsufficientDataError(SymoptError, ValueError):
    """Too few projections or scales to carry out a reconstruction."""


class EdgeDecayWarning(UserWarning):
    """A sampled field does not decay at the edges of its grid."""
