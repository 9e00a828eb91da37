"""Exception hierarchy shared by all modules."""


class LPCError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(LPCError, ValueError):
    """Invalid block size, plane count, or other parameter."""


class FormatError(LPCError):
    """Malformed input data (image container, header, recovery stream)."""


class PGMError(FormatError):
    pass


class BadMagicError(PGMError):
    pass


class BadHeaderError(PGMError):
    pass


class MaxvalError(PGMError):
    pass


class TruncatedRasterError(PGMError):
    pass


class CorruptDataError(FormatError):
    """Recovery information or control parameters fail to decode."""


class CapacityError(LPCError):
    """Payload does not fit, or the image cannot host the control header."""

    def __init__(self, message, capacity=None):
        super().__init__(message)
        self.capacity = capacity


class ImageUnsupportedError(CapacityError):
    pass


class KeyMismatchError(LPCError):
    """A key-derived mark did not verify: wrong key or tampered carrier."""
