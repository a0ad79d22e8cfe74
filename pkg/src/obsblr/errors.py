"""Exception types raised by the library."""


class ObsError(ValueError):
    """Base class for every validation failure in this package."""


class ParameterError(ObsError):
    """A model parameter lies outside its domain."""


class TimingError(ParameterError):
    """Burst timing does not divide into a whole number of slots."""


class PreconditionError(ObsError):
    """An operation was called with arguments outside its contract."""


class DegenerateInputError(ObsError):
    """Input for which the quantity is defined only by a limit convention."""
