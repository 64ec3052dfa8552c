"""Exception hierarchy shared by all dvps modules."""


class DvpsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(DvpsError):
    """Raster shapes do not agree where they must."""


class ValidationError(DvpsError):
    """A domain invariant is violated (label spec, panoptic map, pair, ...)."""


class WindowError(DvpsError):
    """Requested evaluation window exceeds the sequence length."""


class DomainError(DvpsError):
    """A numeric input lies outside the mathematical domain of an operation."""


class EmptyMaskError(DvpsError):
    """An evaluation mask selected zero valid pixels."""


class FormatError(DvpsError):
    """A file does not conform to the declared on-disk format."""


class ConfigError(DvpsError):
    """A scene or run configuration is internally inconsistent."""
