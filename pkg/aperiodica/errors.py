from pydantic import ValidationError

ConfigValidationError = ValidationError


class AperiodicaError(ValueError):
    """Exception raised for errors that are related to point sets, regions and searches."""


class InvalidParameterError(AperiodicaError):
    ...


class InvalidRegionError(InvalidParameterError):
    ...


class DimensionMismatchError(InvalidParameterError):
    ...


class LiteralParseError(InvalidParameterError):
    """Exception raised when a scalar or region literal cannot be parsed."""


class InsufficientDataError(AperiodicaError):
    ...


class NotFoundError(AperiodicaError):
    """Exception raised when a search exhausts its window without a result that the caller requires."""


class NotRepetitiveError(AperiodicaError):
    """Exception raised when a patch has no occurrence other than itself inside the scan window."""


class PartialTowerError(AperiodicaError):
    ...


class ConfigError(AperiodicaError):
    ...


class InternalInvariantError(AperiodicaError):
    """Exception raised when a checked inequality fails, which signals a bug rather than bad input."""
