class WavecohError(Exception):
    """Base class for errors raised by this package."""


class InputError(WavecohError, ValueError):
    """Bad input data: unreadable files, malformed rows, degenerate series."""


class ConfigError(WavecohError, ValueError):
    """Analysis parameters outside their valid range."""
