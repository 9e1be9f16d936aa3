"""symopt: symplectic optics transforms, phase-space distributions and
Hermite-Gaussian wavelet transforms."""
from . import field, phase_space, special, symplectic, transforms, wavelets
from .errors import (DomainError, EdgeDecayWarning, InsufficientDataError,
                     NumericalIntegrityError, ParseError, RepresentationError,
                     ShapeError, SingularError, SymoptError)
from .field import Field1D, Field2D, Grid1D, Grid2D, Tomogram
from .symplectic import RayMatrix, SRParams, compose

__version__ = "0.1.0"
