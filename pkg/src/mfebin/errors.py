"""Exception types raised across the package."""


class MfeBinError(Exception):
    """Base class for every error raised by mfebin."""


class IoError(MfeBinError, OSError):
    """A file could not be read or written."""


class FormatError(MfeBinError, ValueError):
    """An image uses an unsupported bit depth or encoding."""


class DimensionError(MfeBinError, ValueError):
    """Image or mask dimensions are invalid or inconsistent."""


class ConfigError(MfeBinError, ValueError):
    """A parameter or configuration value is invalid."""


class EmptyGroundTruth(MfeBinError, ValueError):
    """The ground truth holds no text pixels."""


class UniformGroundTruth(MfeBinError, ValueError):
    """The ground truth has no non-uniform blocks, so DRD is undefined."""


class DegenerateInput(MfeBinError, ValueError):
    """A loss was evaluated at a point where it is undefined."""


class NonFiniteCritic(MfeBinError, ArithmeticError):
    """A critic returned a non-finite value while being probed."""


class MissingGtError(MfeBinError, LookupError):
    """An input image has no matching ground-truth file."""


class BackendError(MfeBinError, RuntimeError):
    """A pluggable backend failed or produced malformed output."""
