"""
Error Types

Exceptions raised by the gascatter library. Each carries the process exit
code the command-line front end reports for it.
"""


class GascatterError(Exception):
    """Base class for all gascatter errors."""

    exit_code: int = 1


class ConfigError(GascatterError, ValueError):
    """Invalid configuration, parameter value or command-line usage."""

    exit_code = 2


class GridError(ConfigError):
    """Empty, non-finite or non-increasing detuning grid."""


class EmptySearchBoxError(ConfigError):
    """Optimizer search box with no free axis or a degenerate range."""


class ChannelClosedError(GascatterError, ValueError):
    """A requested detuning leaves an incident or outgoing channel evanescent."""

    exit_code = 3


class UnsupportedIncidenceError(GascatterError, ValueError):
    """Closed-form amplitudes requested for an incidence they do not cover."""


class InsufficientDataError(GascatterError, ValueError):
    """Too few samples for the requested analysis."""


class ToleranceBreachError(GascatterError, RuntimeError):
    """Closed-form amplitudes disagree with the oracle beyond tolerance."""

    exit_code = 4
