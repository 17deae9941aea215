"""Exception hierarchy. The CLI maps each class to an exit code."""


class BoostError(Exception):
    exit_code = 3


class ConfigError(BoostError, ValueError):
    """Bad configuration, flag, or parameter value."""

    exit_code = 1


class DataError(BoostError, ValueError):
    """Malformed or inconsistent data, cost, or model file."""

    exit_code = 2


class InvariantError(BoostError, AssertionError):
    """An internal consistency check failed."""

    exit_code = 3
