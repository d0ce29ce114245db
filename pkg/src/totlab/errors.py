"""Exception hierarchy shared by every module.

The CLI maps :class:`ArgumentError` (and its subclasses) to exit code 2 and
:class:`CapacityError` / :class:`PrecisionError` to exit code 3.
"""


class TotlabError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(TotlabError, ValueError):
    """An argument violates an operation's precondition."""


class DomainError(ArgumentError):
    """A real/complex parameter lies outside the function's domain."""


class GeometryError(ArgumentError):
    """A pole lies on, or too close to, an integration contour."""


class CapacityError(TotlabError):
    """The request exceeds a configured size or cost cap."""


class PrecisionError(TotlabError):
    """The requested tolerance cannot be met in double precision."""
