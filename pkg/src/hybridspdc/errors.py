"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for all errors raised by :mod:`hybridspdc`."""


class CutoffTooSmall(SimulationError):
    """A truncated expansion lost more norm than the declared tolerance."""


class RescaleUndefined(SimulationError):
    """Division by ``(alpha*eta)**n`` requested with ``alpha*eta == 0``."""


class DivisionByZeroEntry(SimulationError, ZeroDivisionError):
    pass


class UnknownLabel(SimulationError, KeyError):
    pass


class MissingGEntry(SimulationError, KeyError):
    pass


class FrameMismatch(SimulationError, ValueError):
    """Two operands disagree on mode order or displacement frames."""


class NonZeroFrame(SimulationError, ValueError):
    """A click detector was placed on a mode that still carries a displacement."""


class DimensionTooLarge(SimulationError, ValueError):
    pass
