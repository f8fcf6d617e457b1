"""Haar integrals over quantum permutation groups and flat magic matrix models."""
from . import generators, models, partitions, permgroup, weingarten
from .errors import (
    BoundsError,
    ConstructionError,
    ConvergenceError,
    NumericalDegeneracyError,
    NumericalIntegrityError,
    QPermError,
    ResourceError,
    SingularGramError,
    StructuralError,
)
from .models import MagicModel

__version__ = "0.1.0"
