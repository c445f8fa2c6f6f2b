"""Exception hierarchy.

Input-format problems (bad files) and computation problems (degenerate
signals) are kept apart because the command line maps them to different
exit codes.
"""


class CycloError(Exception):
    """Base class for all package errors."""


class InputFormatError(CycloError, ValueError):
    """A file could not be parsed or uses an unsupported layout."""


class NotAWavError(InputFormatError):
    pass


class UnsupportedEncodingError(InputFormatError):
    pass


class EmptyAudioError(InputFormatError):
    pass


class FeatureFileError(InputFormatError):
    pass


class BadMagicError(FeatureFileError):
    pass


class VersionUnsupportedError(FeatureFileError):
    pass


class TruncatedPayloadError(FeatureFileError):
    pass


class ComputationError(CycloError, ValueError):
    """Valid input that the requested computation cannot handle."""


class SignalTooShortError(ComputationError):
    pass


class AllSilentError(ComputationError):
    pass


class ShapeMismatchError(ComputationError):
    pass


class UnstableModelError(ComputationError):
    pass


class SingleClassError(ComputationError):
    pass
