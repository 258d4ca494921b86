"""Exception types shared across the package."""


class SecGrowthError(Exception):
    """Base class for all package errors."""


class NonConvergent(SecGrowthError):
    """Adaptive refinement exhausted its budget without meeting the tolerance."""


class InvalidTolerance(SecGrowthError):
    pass


class UnsupportedExponent(SecGrowthError):
    pass


class InsufficientSamples(SecGrowthError):
    pass


class NonPositiveValue(SecGrowthError):
    pass


class SingularSeparation(SecGrowthError):
    """Evaluation point lies on (or too close to) the light cone."""


class NonPositiveEnergy(SecGrowthError):
    pass


class InvalidMass(SecGrowthError):
    pass


class StencilIllConditioned(SecGrowthError):
    pass


class DimensionMismatch(SecGrowthError):
    pass


class BudgetExceeded(SecGrowthError):
    pass


class DegenerateMode(SecGrowthError):
    pass


class NonTransversalPotential(SecGrowthError):
    pass


class BelowThreshold(SecGrowthError):
    pass


class ConfigInvalid(SecGrowthError):
    pass


class BoundedSignal(SecGrowthError):
    """Scan signal is numerically zero; no growth exponent can be fitted."""
