"""Exception hierarchy shared by all weyllab modules."""


class WeylError(Exception):
    """Base class for every error raised by weyllab."""


class InvalidInputError(WeylError, ValueError):
    """Arguments violate an operation's precondition."""


class PrecisionError(WeylError, ArithmeticError):
    """The exact phase path cannot represent n**k for the requested sizes."""


class ResourceError(WeylError):
    """A grid or panel budget would be exceeded."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class QuadratureError(WeylError):
    """Adaptive quadrature failed to reach its tolerance within the panel budget."""

    def __init__(self, message: str, achieved: float, value: complex):
        super().__init__(message)
        self.achieved = achieved
        self.value = value
