"""Exception types raised across the package."""


class SensitivityError(ValueError):
    """Base class for all package errors."""


class DegenerateInput(SensitivityError):
    """The input carries no phase information, or a ratio is undefined."""


class UnsupportedScheme(SensitivityError):
    """The detection scheme has no formula for the requested quantity."""


class UnsupportedParameter(SensitivityError):
    """A closed form was requested outside the parameter range it covers."""


class SingularPoint(SensitivityError):
    """The closed form has a vanishing denominator at these parameters."""


class IndeterminateSensitivity(SensitivityError):
    """Both the standard deviation and the slope vanish (0/0)."""


class TruncationTooSmall(SensitivityError):
    """A fixed Fock cutoff loses more probability than allowed."""


class NoInteriorMinimum(SensitivityError):
    """The minimum of a search sits on the boundary of the interval."""
