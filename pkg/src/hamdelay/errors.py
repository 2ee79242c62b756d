"""Exception types raised by the library."""


class HamDelayError(Exception):
    """Base class for all library errors."""


class InvalidDelayError(HamDelayError, ValueError):
    """A delay is not representable on the loop grid."""


class GridTooCoarseError(HamDelayError, ValueError):
    pass


class DimensionError(HamDelayError, ValueError):
    """Shapes or phase-space dimensions do not match."""


class NotSkewSymmetricError(HamDelayError, ValueError):
    pass


class ModelSpecError(HamDelayError, ValueError):
    """A model ID or a configuration could not be interpreted."""


class SolverBreakdownError(HamDelayError, RuntimeError):
    """The damped normal equations could not be solved."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BlowUpError(HamDelayError, RuntimeError):
    """An integrated state became non-finite."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step
