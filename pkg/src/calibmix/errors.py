"""Exception types shared across the package."""


class CalibmixError(Exception):
    """Base class for package errors."""


class ParamError(CalibmixError, ValueError):
    """Invalid parameter bundle or degenerate input (e.g. constant x design)."""


class DataError(CalibmixError, ValueError):
    """Malformed input data; message carries the offending row number when known."""


class AccuracyError(CalibmixError, RuntimeError):
    """A quadrature or series evaluation could not certify the requested tolerance."""
