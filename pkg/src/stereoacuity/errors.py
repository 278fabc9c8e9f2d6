"""Exception types shared across the toolkit."""


class StereoacuityError(Exception):
    """Base class for all toolkit errors."""


class InvalidProfile(StereoacuityError):
    """Display profile with non-positive density or resolution."""


class InvalidGeometry(StereoacuityError):
    """Non-positive distance, interpupillary distance, or level count."""


class NotIntegerMultiple(StereoacuityError):
    """Viewing distance is not an integer multiple of the reference distance."""


class ProtocolViolation(StereoacuityError):
    """Two-rod measurement set does not contain exactly six values."""


class StimulusTooLarge(StereoacuityError):
    """Figure does not fit on the display or canvas."""


class SessionFinished(StereoacuityError):
    """Response submitted to a session that already has an outcome."""


class LowConfidence(StereoacuityError):
    """Disparity decoding failed to find correlation peaks in most blocks."""


class NoFigure(StereoacuityError):
    """No disparity-defined region could be segmented from the image."""


class UnmappableValue(StereoacuityError):
    """Measurement value outside the range any ordinal band covers."""


class DegenerateMarginals(StereoacuityError):
    """Confusion matrix whose chance agreement is exactly one."""


class NoEffectivePairs(StereoacuityError):
    """Paired test where every difference is zero (or no pairs at all)."""


class DatasetError(StereoacuityError):
    """Malformed measurement CSV."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number
