"""Exception hierarchy shared by every module of the package."""


class PaletteForgeError(Exception):
    """Base class for all errors raised by palette_forge."""


class TooManyColors(PaletteForgeError, ValueError):
    pass


class LengthMismatch(PaletteForgeError, ValueError):
    pass


class EmptySequence(PaletteForgeError, ValueError):
    pass


class BadParams(PaletteForgeError, ValueError):
    pass


class PaletteTooLarge(PaletteForgeError, ValueError):
    pass


class UnsupportedFormat(PaletteForgeError, ValueError):
    pass


class DecodeError(PaletteForgeError, ValueError):
    """Raised when a container cannot be decoded.

    ``section`` names the part of the container where decoding failed.
    """

    def __init__(self, message: str, section: str = ""):
        super().__init__(message)
        self.section = section


class MalformedHeader(DecodeError):
    pass


class CorruptChecksum(DecodeError):
    pass


class TruncatedPayload(DecodeError):
    pass
