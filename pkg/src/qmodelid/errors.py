"""Exception hierarchy.

All library errors derive from :class:`QModelError`. Numerical failures
(ill-conditioning, singular transforms) derive from :class:`NumericalError`
so the CLI can map them to a distinct exit code.
"""


class QModelError(Exception):
    """Base class for all library errors."""


class InvalidArgument(QModelError, ValueError):
    pass


class DimensionMismatch(QModelError, ValueError):
    pass


class ShapeMismatch(QModelError, ValueError):
    """Two representations have different index-set sizes."""


class IndexOutOfRange(QModelError, IndexError):
    pass


class ValueOutOfRange(QModelError, ValueError):
    """A probability fell outside [0, 1] by more than the tolerance (strict mode)."""


class CapExceeded(QModelError):
    """A probability table would exceed the configured entry cap."""


class NotUnitary(QModelError, ValueError):
    pass


class NotPhysical(QModelError, ValueError):
    pass


class NotHPTP(QModelError, ValueError):
    pass


class NotComplete(QModelError):
    """Fiducial states or effects do not span the operator space."""

    def __init__(self, message, rank_states=None, rank_effects=None):
        super().__init__(message)
        self.rank_states = rank_states
        self.rank_effects = rank_effects


class NotEquivalent(QModelError):
    pass


class FOutOfWindow(QModelError, ValueError):
    pass


class TrivialModel(QModelError, ValueError):
    pass


class TrivialMatrix(QModelError, ValueError):
    pass


class NotProjection(QModelError, ValueError):
    pass


class GramMismatch(QModelError, ValueError):
    pass


class NumericalError(QModelError, ArithmeticError):
    pass


class SingularTransform(NumericalError):
    pass


class InconsistentGauge(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass
