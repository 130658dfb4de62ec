"""Exception hierarchy shared by every luequiv module."""


class LUEquivError(Exception):
    """Base class for all errors raised by luequiv."""


class NonHermitianInput(LUEquivError, ValueError):
    pass


class InvalidState(LUEquivError, ValueError):
    """A density matrix or pure state failed validation."""


class NotNormalized(InvalidState):
    pass


class NotBipartite(LUEquivError, ValueError):
    pass


class ShapeMismatch(LUEquivError, ValueError):
    pass


class ModeOutOfRange(LUEquivError, IndexError):
    pass


class IndexOutOfRange(LUEquivError, IndexError):
    pass


class BudgetExceeded(LUEquivError, RuntimeError):
    """Word enumeration would exceed the configured count cap."""


class ConvergenceFailure(LUEquivError, RuntimeError):
    pass


class NotIsotropicLike(LUEquivError, ValueError):
    pass


class MultipleDegenerateClusters(NotIsotropicLike):
    """More than one repeated eigenvalue: outside the isotropic-like class."""


class NotWhiteNoiseForm(LUEquivError, ValueError):
    pass


class DegenerateAlignment(LUEquivError, RuntimeError):
    pass


class ValidationFailed(LUEquivError, RuntimeError):
    pass


class ParameterOutOfRange(LUEquivError, ValueError):
    pass


class NotUnitary(LUEquivError, ValueError):
    pass


class StateFileError(LUEquivError, ValueError):
    """A state file is malformed or fails validation on read."""
