"""Exceptions raised while decoding compressed streams."""


class DecodeError(Exception):
    """Base class for anything that can go wrong while decompressing."""


class TruncatedPayloadError(DecodeError):
    """The arithmetic-coded payload ended before decoding finished."""


class ContainerFormatError(DecodeError):
    """The container header is missing, malformed, or from an unknown version."""


class LengthMismatchError(DecodeError):
    """Decoded output does not match the length recorded in the header."""
