"""Exception hierarchy shared across the package.

Two failure families matter operationally: problems with the *input data*
(malformed files, missing variables, nonpositive values handed to a log
transform) and problems arising *inside a numerical stage* (singular moment
matrices, missing critical-value entries, impossible rank requests).  The CLI
maps the former to exit code 1 and the latter to exit code 2, so every
exception raised by library code should derive from one of the two branches
below.
"""


class CoinformError(Exception):
    """Base class for all package-specific errors."""


class DataError(CoinformError):
    """Raised when input data is malformed, inconsistent, or unusable."""


class EstimationError(CoinformError):
    """Raised when a numerical stage cannot produce a valid result."""


class CriticalValueError(EstimationError):
    """Raised when no critical-value entry exists for a requested lookup."""
