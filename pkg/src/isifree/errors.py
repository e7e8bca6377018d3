"""Exception hierarchy shared by every module."""


class IsiFreeError(Exception):
    """Base class for all library errors."""


class StateSpaceError(IsiFreeError):
    """The requested channel has more states than the configured limit."""


class ConvergenceError(IsiFreeError):
    """An iterative solver hit its iteration cap."""


class EnumerationLimitError(IsiFreeError):
    """An exhaustive search would exceed its enumeration cap."""


class StationaryError(IsiFreeError):
    """A Markov chain has no unique stationary distribution."""


class MalformedCodeError(IsiFreeError):
    """A modulation code is structurally broken (e.g. an unparseable bit prefix)."""


class DesyncError(IsiFreeError):
    """The decoder saw a symbol string that matches no codeword."""


class UnsupportedSpecError(IsiFreeError):
    """The operation does not support this channel configuration."""
