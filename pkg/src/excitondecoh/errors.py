"""Exception hierarchy. CLI exit codes are attached to each class."""


class ExcitonDecohError(Exception):
    exit_code = 1


class ParameterError(ExcitonDecohError, ValueError):
    """Invalid physical or configuration parameter."""

    exit_code = 2


class RegimeError(ExcitonDecohError):
    """Formula evaluated outside the regime it was derived for."""

    exit_code = 3


class RecurrenceError(ExcitonDecohError):
    """Requested time exceeds the discretized bath's recurrence guard."""

    exit_code = 3


class PoleProximityError(ExcitonDecohError, ZeroDivisionError):
    """Laplace-domain function evaluated at (or numerically at) a pole."""

    exit_code = 3


class ConvergenceError(ExcitonDecohError):
    """Numerical integration failed to reach the requested tolerance."""

    exit_code = 4

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error
