"""Exception types raised by accelcal."""


class AccelCalError(Exception):
    """Base class for all accelcal errors."""


class DomainError(AccelCalError, ValueError):
    """Inputs fall outside the domain where a formula is valid."""


class ParameterError(AccelCalError, ValueError):
    """Calibration parameters are invalid (zero/negative scale, bad angles)."""


class InputError(AccelCalError, ValueError):
    """Input data is malformed or insufficient."""


class IllPosedDatasetError(AccelCalError):
    """The pose dataset cannot determine all nine calibration parameters."""
