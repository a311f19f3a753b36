"""Exception hierarchy shared across the package.

Plain ValueError is used for argument errors; the classes here cover the
failure modes that callers are expected to branch on.
"""


class SsendoError(Exception):
    """Base class for package-specific failures."""


class InternalError(SsendoError):
    """A cross-check that must hold by theory failed; indicates a bug."""


class ResourceError(SsendoError):
    """A resource ceiling (precision, sweep bound) was exceeded."""


class DataError(SsendoError):
    """A shipped or cached data file is missing or fails validation."""


class VerificationError(SsendoError):
    """A self-check against reference values did not hold."""


class IncompleteSweepError(ResourceError):
    """A q-sweep hit its ceiling before terminating; carries partial data."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
