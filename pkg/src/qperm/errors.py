"""Exception types shared across the package."""


class QPermError(Exception):
    """Base class for all errors raised by qperm."""


class BoundsError(QPermError, ValueError):
    """A size parameter is outside the supported range."""


class ResourceError(QPermError):
    """A computation would exceed a configured size cap."""


class StructuralError(QPermError, ValueError):
    """Input arrays have inconsistent shapes."""


class SingularGramError(QPermError, ArithmeticError):
    """The Gram matrix for ``(k, n, family)`` is not invertible."""

    def __init__(self, k, n, family):
        self.k = k
        self.n = n
        self.family = family
        super().__init__(f"Gram matrix is singular for k={k}, n={n}, family={family}")


class ConvergenceError(QPermError):
    """Cesaro averaging did not settle within the iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class NumericalIntegrityError(QPermError):
    """A numerical invariant that must hold (e.g. spectral radius <= 1) failed."""


class NumericalDegeneracyError(QPermError):
    """A rank could not be decided because an eigenvalue sits too close to 1/2."""


class ConstructionError(QPermError):
    """A generator produced a model that fails its own postcondition."""
