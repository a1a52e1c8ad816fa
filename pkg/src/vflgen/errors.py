"""Exception types raised across the package."""


class VflError(Exception):
    """Base class for all package errors."""


class InputError(VflError, ValueError):
    """Invalid argument or malformed input data."""


class BehindCameraError(InputError):
    """A point with non-positive depth was projected."""


class UnfillableError(VflError):
    """Hole filling was asked to complete a frame with no valid pixels."""


class EmptyEvaluationError(VflError):
    """A metric or loss was evaluated over zero valid pixels."""


class RgbdIOError(VflError, OSError):
    """Base class for RGB-D file errors."""


class UnreadableImageError(RgbdIOError):
    pass


class BitDepthError(RgbdIOError):
    pass


class DimensionMismatchError(RgbdIOError):
    pass
