"""Exception types shared across the package."""


class RdRegionError(Exception):
    """Base class for all package errors."""


class UnknownVariable(RdRegionError):
    """A query named an axis that the distribution does not have."""


class DuplicateVariable(RdRegionError):
    """An axis name would occur twice in one distribution."""


class InvalidQuery(RdRegionError):
    """Query sets overlap, are empty, or are otherwise malformed."""


class ModelError(RdRegionError):
    """A source model, factor, or distortion measure is inconsistent."""


class DecoderError(RdRegionError):
    """A decoder rule does not cover its observation space or is malformed."""


class ConstraintError(RdRegionError):
    """A required structural constraint is violated beyond tolerance."""


class ConfigError(RdRegionError):
    """A search or simulation configuration is invalid or exceeds a resource cap."""


class InputError(RdRegionError):
    """Sequence or file input is malformed."""


class InsufficientSamples(RdRegionError):
    """A Monte Carlo estimate has an empty denominator."""
