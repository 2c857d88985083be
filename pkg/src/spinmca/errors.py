"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`SpinMCAError`
so the CLI can map failure classes onto exit codes.
"""


class SpinMCAError(Exception):
    """Base class for all package errors."""


class ArgumentError(SpinMCAError, ValueError):
    """An argument violates an operation's precondition."""


class RangeError(ArgumentError):
    """A value lies outside its permitted range."""


class CalibrationError(SpinMCAError):
    """A device calibration cannot be solved."""


class ProgrammingError(SpinMCAError):
    """Closed-loop programming did not converge."""


class DisturbError(ArgumentError):
    """A read voltage would disturb the stored memristor state."""


class ScheduleError(ArgumentError):
    """Invalid clock schedule."""


class ParseError(SpinMCAError):
    """Malformed input file."""


class UnsupportedVersionError(ParseError):
    """Weight file written with an unknown schema version."""
