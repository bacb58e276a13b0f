"""Exception types raised across the package."""


class HCCEError(Exception):
    """Base class for all package errors."""


class CodecDomainError(HCCEError, ValueError):
    """A coordinate component outside [0, 1] was given to a codec."""


class InvalidNormalizerError(HCCEError, ValueError):
    pass


class UndefinedHistogramError(HCCEError, ValueError):
    pass


class ShapeMismatchError(HCCEError, ValueError):
    pass


class MeshParseError(HCCEError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EmptyMeshError(HCCEError, ValueError):
    pass


class BehindCameraError(HCCEError, ValueError):
    pass


class DegenerateInputError(HCCEError, ValueError):
    pass


class DegenerateConfigurationError(HCCEError):
    """PnP input admits no unique pose (collinear points, rank deficiency)."""


class InsufficientDataError(HCCEError):
    pass


class NoPoseError(HCCEError):
    """Every RANSAC hypothesis was degenerate."""


class UndefinedMetricError(HCCEError, ValueError):
    pass


class UnrenderableConfigurationError(HCCEError):
    pass


class FormatError(HCCEError, ValueError):
    """Bad magic number or unsupported version in a binary file."""


class TruncationError(FormatError):
    def __init__(self, section):
        self.section = section
        super().__init__(f"file truncated: missing {section}")
